//! f64 helpers that work without std (libm supplies the transcendentals there).

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident, $std:ident, $libm:ident) => {
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            f64::$std(x)
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident, $std:ident, $libm:ident) => {
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$libm(x)
        }
    };
}

shim!(exp, exp, exp);
shim!(ln, ln, log);
shim!(expm1, exp_m1, expm1);
shim!(ln1p, ln_1p, log1p);
shim!(sqrt, sqrt, sqrt);
shim!(cos, cos, cos);
shim!(sin, sin, sin);
shim!(abs, abs, fabs);

/// log(sum(exp(x))) with max subtraction; -inf on an empty slice.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &x in xs {
        if x > m {
            m = x;
        }
    }
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut s = 0.0;
    for &x in xs {
        s += exp(x - m);
    }
    m + ln(s)
}

/// Neumaier-compensated running sum, so per-term rounding does not swamp
/// residual tolerances at large N.
#[derive(Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// x*ln(x) extended by continuity with 0 at x=0.
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * ln(x)
    }
}
