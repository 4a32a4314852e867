/// Numerical tolerance policy, threaded through constructors and decompositions.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Symmetry / symplecticity residual (Frobenius).
    pub sym: f64,
    /// Eigenvalue slack for the Heisenberg check and pure-state detection.
    pub eig: f64,
    /// Relative reconstruction residual for decompositions.
    pub dec: f64,
    /// Allowed mismatch between "equal" reduced states.
    pub matching: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sym: 1e-9,
            eig: 1e-7,
            dec: 1e-8,
            matching: 1e-6,
        }
    }
}

impl Tolerances {
    /// Uniformly rescale all tolerances; squeezing amplifies round-off
    /// roughly by e^{2r}, so callers working far from the vacuum may widen.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances {
            sym: self.sym * factor,
            eig: self.eig * factor,
            dec: self.dec * factor,
            matching: self.matching * factor,
        }
    }
}
