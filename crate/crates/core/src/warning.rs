use std::fmt;

/// Non-fatal conditions observed while estimating.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The gap between singular values K and K+1 is below tolerance.
    DegenerateSpectrum { ratio: f64 },
    /// An arcsin argument fell outside [−1, 1] and was clipped.
    ArcsinClipped { index: usize, argument: f64 },
    /// `B B^H` could not be inverted; identity weight was used instead.
    SingularWeight,
    /// The WLS iteration hit its cap before meeting the tolerance.
    NotConverged { iterations: usize },
    /// An eigenvalue expected to be real had a significant imaginary part.
    ComplexEigenvalue { index: usize, imag: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DegenerateSpectrum { ratio } => {
                write!(f, "degenerate spectrum (gap ratio {ratio:.3e})")
            }
            Warning::ArcsinClipped { index, argument } => {
                write!(f, "arcsin argument {argument:.6} clipped for root {index}")
            }
            Warning::SingularWeight => write!(f, "singular LP weight, identity used"),
            Warning::NotConverged { iterations } => {
                write!(f, "WLS not converged after {iterations} iterations")
            }
            Warning::ComplexEigenvalue { index, imag } => {
                write!(f, "eigenvalue {index} has imaginary part {imag:.3e}")
            }
        }
    }
}
