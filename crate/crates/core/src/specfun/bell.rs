//! Complete Bell polynomials and falling factorials.

/// B₀…B_n for inputs x₁…x_n, by B_{i+1} = Σ_{j=0}^{i} C(i,j) B_{i−j} x_{j+1}.
pub fn complete_bell_all(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut b = Vec::with_capacity(n + 1);
    b.push(1.0);
    // binomial row C(i, ·), updated in place
    let mut binom = vec![1.0f64; n + 1];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..=i {
            acc += binom[j] * b[i - j] * x[j];
        }
        b.push(acc);
        // advance the row from i to i+1
        for j in (1..=i + 1).rev() {
            binom[j] += binom[j - 1];
        }
        binom[i + 1] = 1.0;
    }
    b
}

/// B_n(x₁, …, x_n) with n = `x.len()`; the empty input gives B₀ = 1.
pub fn complete_bell(x: &[f64]) -> f64 {
    *complete_bell_all(x).last().expect("B0 always present")
}

/// (δ)_i = δ(δ−1)⋯(δ−i+1), with (δ)₀ = 1.
pub fn falling_factorial(delta: f64, i: usize) -> f64 {
    (0..i).map(|k| delta - k as f64).product()
}

/// Rising factorial (a)^(i) = a(a+1)⋯(a+i−1).
pub fn rising_factorial(a: f64, i: usize) -> f64 {
    (0..i).map(|k| a + k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_orders() {
        assert_eq!(complete_bell(&[]), 1.0);
        assert_eq!(complete_bell(&[3.0]), 3.0);
        let (a, b, c) = (1.5, -0.7, 2.25);
        assert!((complete_bell(&[a, b]) - (a * a + b)).abs() < 1e-15);
        assert!((complete_bell(&[a, b, c]) - (a * a * a + 3.0 * a * b + c)).abs() < 1e-14);
    }

    #[test]
    fn unit_inputs_give_bell_numbers() {
        let b = complete_bell_all(&[1.0; 10]);
        let bell = [1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0, 4140.0, 21147.0, 115975.0];
        assert_eq!(b, bell);
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(0.7, 0), 1.0);
        assert!((falling_factorial(2.0 / 3.0, 2) + 2.0 / 9.0).abs() < 1e-16);
        // (½)₅ = ½·(−½)(−3/2)(−5/2)(−7/2) = 105/32
        assert!((falling_factorial(0.5, 5) - 105.0 / 32.0).abs() < 1e-15);
        assert_eq!(falling_factorial(4.0, 5), 0.0);
        assert_eq!(rising_factorial(1.0, 5), 120.0);
    }

    /// Minimal exact rationals for the oracle.
    #[derive(Clone, Copy, Debug, PartialEq)]
    struct Q(i128, i128);

    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    impl Q {
        fn new(n: i128, d: i128) -> Q {
            let g = gcd(n, d).max(1);
            let s = if d < 0 { -1 } else { 1 };
            Q(s * n / g, s * d / g)
        }
        fn add(self, o: Q) -> Q {
            Q::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
        }
        fn mul(self, o: Q) -> Q {
            let g1 = gcd(self.0, o.1).max(1);
            let g2 = gcd(o.0, self.1).max(1);
            Q::new((self.0 / g1) * (o.0 / g2), (self.1 / g2) * (o.1 / g1))
        }
        fn to_f64(self) -> f64 {
            self.0 as f64 / self.1 as f64
        }
    }

    /// Faà di Bruno form: B_n = Σ over partitions n = Σ j m_j of
    /// n! / Π (m_j! (j!)^{m_j}) Π x_j^{m_j}. Independent of the recurrence.
    fn bell_by_partitions(x: &[Q]) -> Q {
        fn fact(n: usize) -> i128 {
            (1..=n as i128).product()
        }
        fn rec(x: &[Q], n: usize, rest: usize, part: usize, mult: &mut Vec<usize>, acc: &mut Q) {
            if rest == 0 {
                let mut den: i128 = 1;
                let mut prod = Q(1, 1);
                for (j, &m) in mult.iter().enumerate() {
                    if m == 0 {
                        continue;
                    }
                    den *= fact(m) * fact(j + 1).pow(m as u32);
                    for _ in 0..m {
                        prod = prod.mul(x[j]);
                    }
                }
                *acc = acc.add(prod.mul(Q::new(fact(n), den)));
                return;
            }
            for p in (1..=part.min(rest)).rev() {
                mult[p - 1] += 1;
                rec(x, n, rest - p, p, mult, acc);
                mult[p - 1] -= 1;
            }
        }
        let n = x.len();
        let mut acc = Q(0, 1);
        rec(x, n, n, n, &mut vec![0; n], &mut acc);
        acc
    }

    #[test]
    fn order_eight_matches_exact_partition_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let xq: Vec<Q> = (0..8)
                .map(|_| Q::new(rng.random_range(-9..=9), rng.random_range(1..=8)))
                .collect();
            let exact = bell_by_partitions(&xq).to_f64();
            let xf: Vec<f64> = xq.iter().map(|q| q.to_f64()).collect();
            let got = complete_bell(&xf);
            let scale = complete_bell(&xf.iter().map(|v| v.abs()).collect::<Vec<_>>());
            assert!((got - exact).abs() <= 1e-13 * scale.max(1.0), "{got} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn linear_in_top_argument(
            lower in prop::collection::vec(-3.0f64..3.0, 1..8),
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
        ) {
            let with = |top: f64| {
                let mut v = lower.clone();
                v.push(top);
                complete_bell(&v)
            };
            let lhs = with(a + b) - with(0.0);
            let rhs = (with(a) - with(0.0)) + (with(b) - with(0.0));
            let scale = with(a.abs() + b.abs()).abs() + with(0.0).abs() + 1.0;
            prop_assert!((lhs - rhs).abs() < 1e-12 * scale);
            // the top argument enters with coefficient exactly 1
            prop_assert!((with(a) - with(0.0) - a).abs() < 1e-12 * scale);
        }
    }
}
