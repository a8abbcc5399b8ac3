//! Gauss–Hermite quadrature (physicists' convention, weight e^{-x²}).
//!
//! Nodes and weights come from Newton iteration on the orthonormal Hermite
//! recurrence, which stays bounded for the orders used here (up to 512).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const PI_QUARTER_INV: f64 = 0.751_125_544_464_943; // pi^(-1/4)

impl GaussHermite {
    /// Computes the `order`-point rule. Node isolation uses Sturm-count
    /// bisection on the Jacobi matrix of the Hermite recurrence (robust at
    /// any order), followed by two Newton polish steps on the orthonormal
    /// recurrence; weights come from the derivative identity.
    pub fn new(order: usize) -> Result<Self> {
        assert!(order >= 2, "quadrature order must be at least 2");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];

        // #eigenvalues of the Jacobi matrix strictly below `lambda`, via the
        // LDLᵀ Sturm sequence. Diagonal is zero; squared off-diagonals j/2.
        let count_below = |lambda: f64| -> usize {
            let mut q = -lambda;
            let mut count = usize::from(q < 0.0);
            for j in 1..n {
                if q == 0.0 {
                    q = -1e-300;
                }
                q = -lambda - (j as f64 / 2.0) / q;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };

        let bound = f64::sqrt(2.0 * (n as f64 - 1.0)) + 1.0;
        let m = n / 2; // orders used here are even; spectrum is symmetric
        for i in 0..m {
            // Isolate the (n-1-i)-th smallest eigenvalue (the i-th largest).
            let target = n - 1 - i;
            let mut lo = 0.0;
            let mut hi = bound;
            for _ in 0..70 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut z = 0.5 * (lo + hi);

            let mut pp = 0.0;
            for _ in 0..4 {
                let mut p1 = PI_QUARTER_INV;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                if !pp.is_finite() || pp == 0.0 {
                    return Err(Error::QuadratureDivergence {
                        order: n,
                        delta: f64::NAN,
                    });
                }
                z -= p1 / pp;
            }

            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }

        Ok(Self { nodes, weights })
    }

    /// Cached rule lookup; orders repeat heavily across expected-cost calls.
    pub fn cached(order: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&order) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(order)?);
        cache
            .lock()
            .unwrap()
            .entry(order)
            .or_insert_with(|| Arc::clone(&rule));
        Ok(rule)
    }

    /// ∫ e^{-x²} f(x) dx over the real line.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// E[g(Z)] for Z ~ N(0,1), via the substitution z = √2·x.
    pub fn normal_expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        let scale = std::f64::consts::PI.sqrt().recip();
        scale * self.integrate(|x| g(std::f64::consts::SQRT_2 * x))
    }
}
