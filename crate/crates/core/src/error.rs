use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The decay exponent must satisfy `alpha > 1` for `sum r^-alpha` to converge.
    NonSummableDecay(f64),
    InvalidBeta(f64),
    InvalidField(f64),
    /// A coupling was requested at distance zero.
    SelfCoupling,
    InvalidSpin(i64),
    EmptyWindow,
    CutoffTooSmall {
        cutoff: u64,
        required: u64,
    },
    SiteNotFree(i64),
    SiteFrozenAndFree(i64),
    DuplicateSite(i64),
    VolumeTooLarge {
        size: usize,
        cap: usize,
    },
    ObservableOutsideVolume(i64),
    NotNested,
    InvalidChain(&'static str),
    /// Every ghost bond is certain, so no cluster can ever flip.
    GhostFrozen,
    /// The size law `N(L) = L^{1/(alpha-1)}` only holds for `1 < alpha <= 2`.
    OutsideDysonRegime(f64),
    /// The odd-sublattice rescaling needs a purely alternating constraint.
    NotPurelyAlternating,
    InvalidGeometry(&'static str),
    NoEvenSites,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonSummableDecay(a) => {
                write!(f, "alpha = {a} is not summable: the couplings r^-alpha need alpha > 1")
            }
            Error::InvalidBeta(b) => write!(f, "inverse temperature must be finite and >= 0, got {b}"),
            Error::InvalidField(h) => write!(f, "external field must be finite, got {h}"),
            Error::SelfCoupling => write!(f, "coupling at distance 0 (self-coupling) is undefined"),
            Error::InvalidSpin(v) => write!(f, "spin value {v} is not -1 or +1"),
            Error::EmptyWindow => write!(f, "window is empty"),
            Error::CutoffTooSmall { cutoff, required } => {
                write!(f, "cutoff {cutoff} is smaller than the explicit frozen extent {required}")
            }
            Error::SiteNotFree(s) => write!(f, "site {s} is not a free site of the constraint"),
            Error::SiteFrozenAndFree(s) => write!(f, "site {s} is both frozen and free"),
            Error::DuplicateSite(s) => write!(f, "site {s} listed twice"),
            Error::VolumeTooLarge { size, cap } => {
                write!(f, "volume of {size} free spins exceeds the enumeration cap of {cap}")
            }
            Error::ObservableOutsideVolume(s) => {
                write!(f, "observable depends on site {s}, which is not free")
            }
            Error::NotNested => write!(f, "inner volume is not contained in the outer volume"),
            Error::InvalidChain(why) => write!(f, "invalid chain configuration: {why}"),
            Error::GhostFrozen => {
                write!(f, "every site is bonded to the ghost spin with probability 1; the cluster chain cannot move")
            }
            Error::OutsideDysonRegime(a) => {
                write!(f, "alpha = {a}: the annulus size law needs 1 < alpha <= 2; supply N explicitly")
            }
            Error::NotPurelyAlternating => {
                write!(f, "rescaling needs every even site frozen to (-1)^(j/2) with no annulus")
            }
            Error::InvalidGeometry(why) => write!(f, "invalid probe geometry: {why}"),
            Error::NoEvenSites => write!(f, "window covers no even site"),
        }
    }
}

impl core::error::Error for Error {}
