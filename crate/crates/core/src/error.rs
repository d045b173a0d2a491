use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "wavelength {wavelength_nm:.3} nm is outside the dispersion window [{lo_nm}, {hi_nm}] nm"
    )]
    OutOfDispersionWindow {
        wavelength_nm: f64,
        lo_nm: f64,
        hi_nm: f64,
    },

    #[error("evanescent mode: transverse wavevector {k_trans:.6e} rad/m exceeds the light cone at omega = {omega:.6e} rad/s")]
    EvanescentMode { omega: f64, k_trans: f64 },

    #[error("no real forward root of the e-ray dispersion relation at omega = {omega:.6e} rad/s, kx = {kx:.6e}, ky = {ky:.6e}")]
    NoRealRoot { omega: f64, kx: f64, ky: f64 },

    #[error("total internal reflection at the exit face (c*k/omega = {ratio:.6})")]
    TotalInternalReflection { ratio: f64 },

    #[error("no perfect phase matching at omega = {omega:.6e} rad/s")]
    NoPhaseMatch { omega: f64 },

    #[error("{what} did not converge: reached {achieved:.3e}, requested {requested:.3e}")]
    NotConverged {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("grid under-resolved: {0}")]
    GridUnderresolved(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
