//! Decimation to the even sublattice and the annulus probe geometry.
//!
//! Two index spaces appear here. [`Site`] indexes the original lattice and
//! [`PrimedSite`] the decimated one; the only map between them is
//! `i -> 2i`. Constraints on the decimated lattice are expressed through
//! their preimage: even original sites are frozen to the primed pattern,
//! odd sites (and the origin) stay free.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::lattice::{FrozenConstraint, Interval, ModelParams, Spin, SpinWindow, TailRule};
use crate::math::{ceil, powf, round};
use crate::zeta::{hurwitz, Summation};
use crate::{Error, Result};

/// A site of the original lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site(pub i64);

/// A site of the decimated lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimedSite(pub i64);

impl PrimedSite {
    /// The original site `2i` this primed site reads.
    pub fn preimage(self) -> Site {
        Site(2 * self.0)
    }
}

impl Site {
    /// The primed site this site is read by, if it is even.
    pub fn image(self) -> Option<PrimedSite> {
        (self.0.rem_euclid(2) == 0).then(|| PrimedSite(self.0.div_euclid(2)))
    }
}

/// `omega'_i = omega_{2i}` on every primed site whose preimage lies in the window.
pub fn decimate(window: &SpinWindow) -> Result<SpinWindow> {
    let interval = window.interval().ok_or(Error::NoEvenSites)?;
    let lo = interval.lo().div_euclid(2) + interval.lo().rem_euclid(2);
    let hi = interval.hi().div_euclid(2);
    if lo > hi {
        return Err(Error::NoEvenSites);
    }
    let spins =
        (lo..=hi).map(|i| window.get(PrimedSite(i).preimage().0).expect("preimage lies in the window")).collect();
    Ok(SpinWindow::new(lo, spins))
}

/// Central alternating interval `[-L, L]` inside the annulus `[-N, N]` on the
/// primed lattice, plus the free margin of the simulation window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProbeGeometry {
    l: u64,
    n: u64,
    annulus_sign: Spin,
    window_margin: u64,
}

impl ProbeGeometry {
    /// Geometry with the default margin `2N`.
    pub fn new(l: u64, n: u64, annulus_sign: Spin) -> Result<Self> {
        Self::with_margin(l, n, annulus_sign, 2 * n)
    }

    pub fn with_margin(l: u64, n: u64, annulus_sign: Spin, window_margin: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidGeometry("L must be positive"));
        }
        if n < l {
            return Err(Error::InvalidGeometry("N must be at least L"));
        }
        if window_margin == 0 {
            return Err(Error::InvalidGeometry("window_margin must be positive"));
        }
        if n > (i64::MAX as u64) / 8 || window_margin > (i64::MAX as u64) / 8 {
            return Err(Error::InvalidGeometry("geometry too large"));
        }
        Ok(Self { l, n, annulus_sign, window_margin })
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn annulus_sign(&self) -> Spin {
        self.annulus_sign
    }

    pub fn window_margin(&self) -> u64 {
        self.window_margin
    }

    pub fn with_annulus_sign(self, annulus_sign: Spin) -> Self {
        Self { annulus_sign, ..self }
    }

    /// Original-lattice window `[-2N - margin, 2N + margin]`.
    pub fn window(&self) -> Interval {
        Interval::centered(2 * self.n + self.window_margin)
    }

    /// Primed spin imposed at `i`, for `0 < |i| <= N`.
    pub fn primed_spin(&self, i: PrimedSite) -> Option<Spin> {
        let d = i.0.unsigned_abs();
        if d == 0 || d > self.n {
            None
        } else if d <= self.l {
            Some(Spin::alternating(i.0))
        } else {
            Some(self.annulus_sign)
        }
    }

    /// Number of free original sites: the odd sites of the window plus the origin.
    pub fn free_count(&self) -> u64 {
        let half = 2 * self.n + self.window_margin;
        2 * half.div_ceil(2) + 1
    }
}

/// Preimage constraint with the default alternating continuation beyond the window.
pub fn build_probe_constraint(geometry: &ProbeGeometry) -> FrozenConstraint {
    build_probe_constraint_with_tail(geometry, TailRule::AlternatingEven)
}

/// Preimage constraint of the annulus neighbourhood: even sites `2i` with
/// `0 < |i| <= N` carry the primed pattern, even margin sites and everything
/// beyond the window follow `tail`, odd sites of the window and the origin
/// are free.
pub fn build_probe_constraint_with_tail(geometry: &ProbeGeometry, tail: TailRule) -> FrozenConstraint {
    let window = geometry.window();
    let mut frozen = BTreeMap::new();
    let mut free = Vec::with_capacity(geometry.free_count() as usize);
    for x in window.sites() {
        let site = Site(x);
        match site.image() {
            None => free.push(x),
            Some(PrimedSite(0)) => free.push(x),
            Some(p) => {
                let spin = geometry.primed_spin(p).or_else(|| tail.spin_at(x));
                if let Some(s) = spin {
                    frozen.insert(x, s);
                }
            }
        }
    }
    FrozenConstraint::new(frozen, free, tail).expect("probe sites are distinct and nonempty")
}

/// The odd-sublattice model induced by a purely alternating constraint.
///
/// Odd site `2k + 1` is renumbered `k`. The frozen even spins contribute no
/// field, and the couplings become `J'(r) = (2r)^-alpha = scale * r^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledModel {
    pub scale: f64,
    pub alpha: f64,
    /// External field, unchanged by the renumbering.
    pub h: f64,
}

impl RescaledModel {
    pub fn coupling(&self, r: u64) -> f64 {
        if r == 0 {
            0.0
        } else {
            self.scale * powf(r as f64, -self.alpha)
        }
    }

    /// `-sum_{k<l} J'(l-k) s_k s_l - h sum_k s_k` for spins on consecutive
    /// renumbered sites.
    pub fn hamiltonian(&self, spins: &[Spin]) -> f64 {
        let mut pair = 0.0;
        for (k, a) in spins.iter().enumerate() {
            for (d, b) in spins[k + 1..].iter().enumerate() {
                pair += self.coupling(d as u64 + 1) * a.as_f64() * b.as_f64();
            }
        }
        let magnet: f64 = spins.iter().map(|s| s.as_f64()).sum();
        -pair - self.h * magnet
    }
}

/// Rescaled description of `params` under a purely alternating constraint
/// (odd sites free, every even site of the hull frozen to `(-1)^{x/2}`,
/// alternating continuation). Any annulus or other frozen pattern is refused.
pub fn constrained_model_rescale(params: &ModelParams, constraint: &FrozenConstraint) -> Result<RescaledModel> {
    if constraint.tail() != TailRule::AlternatingEven {
        return Err(Error::NotPurelyAlternating);
    }
    let stored = constraint.stored();
    for x in stored.sites() {
        let ok = if x.rem_euclid(2) == 0 {
            constraint.spin_at(x) == Some(Spin::alternating(x.div_euclid(2)))
        } else {
            constraint.is_free(x)
        };
        if !ok {
            return Err(Error::NotPurelyAlternating);
        }
    }
    Ok(RescaledModel { scale: powf(2.0, -params.alpha()), alpha: params.alpha(), h: params.h() })
}

fn dyson_regime(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::OutsideDysonRegime(alpha))
    }
}

/// Real-valued annulus law `L^{1/(alpha-1)}`.
pub fn annulus_law(alpha: f64, l: u64) -> Result<f64> {
    dyson_regime(alpha)?;
    Ok(powf(l as f64, 1.0 / (alpha - 1.0)))
}

/// `ceil(L^{1/(alpha-1)})` for `1 < alpha <= 2`.
///
/// Values within `1e-9` (relative) of an integer are taken as that integer,
/// so exact powers such as `10^2` do not round up through `powf` error.
pub fn choose_n(alpha: f64, l: u64) -> Result<u64> {
    if l == 0 {
        return Err(Error::InvalidGeometry("L must be positive"));
    }
    let x = annulus_law(alpha, l)?;
    if !(x < 9.0e15) {
        return Err(Error::InvalidGeometry("annulus law exceeds the representable range"));
    }
    let r = round(x);
    let n = if (x - r).abs() <= 1e-9 * r { r } else { ceil(x) };
    Ok(n as u64)
}

/// `2 L N^{1-alpha} / (alpha - 1)`.
pub fn boundary_bound(alpha: f64, l: u64, n: u64) -> Result<f64> {
    check_bound_args(alpha, l, n)?;
    Ok(2.0 * l as f64 * powf(n as f64, 1.0 - alpha) / (alpha - 1.0))
}

fn check_bound_args(alpha: f64, l: u64, n: u64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::NonSummableDecay(alpha));
    }
    if l == 0 || n < l {
        return Err(Error::InvalidGeometry("boundary bound needs 0 < L <= N"));
    }
    Ok(())
}

/// `sum_{k > m} k^-alpha`.
fn tail_after(alpha: f64, m: u64) -> Summation {
    hurwitz(alpha, m as f64 + 1.0)
}

/// Largest change of the Hamiltonian on `[-L, L]` between two boundary
/// conditions that agree on `[-N, N]`:
/// `2 sum_{|x| <= L} sum_{|y| > N} |x - y|^-alpha`.
pub fn worst_case_boundary_energy(alpha: f64, l: u64, n: u64) -> Result<Summation> {
    check_bound_args(alpha, l, n)?;
    let (mut value, mut error) = (0.0, 0.0);
    let l = l as i64;
    let n = n as i64;
    for x in -l..=l {
        for m in [n - x, n + x] {
            let t = tail_after(alpha, m as u64);
            value += 2.0 * t.value;
            error += 2.0 * t.error;
        }
    }
    Ok(Summation { value, error })
}

/// Closed-form upper bound on [`worst_case_boundary_energy`]:
/// `4 (2L+1) [m^-alpha + m^{1-alpha}/(alpha-1)]` with `m = N - L + 1`.
pub fn rigorous_boundary_bound(alpha: f64, l: u64, n: u64) -> Result<f64> {
    check_bound_args(alpha, l, n)?;
    let m = (n - l + 1) as f64;
    Ok(4.0 * (2 * l + 1) as f64 * (powf(m, -alpha) + powf(m, 1.0 - alpha) / (alpha - 1.0)))
}

/// Field of a homogeneous alternating sea on the central odd sites:
/// `2 sum_{k >= L} (2k+1)^-alpha`.
pub fn homogeneous_field_f(alpha: f64, l: u64) -> Result<Summation> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::NonSummableDecay(alpha));
    }
    let factor = 2.0 * powf(2.0, -alpha);
    let s = hurwitz(alpha, l as f64 + 0.5);
    Ok(Summation { value: factor * s.value, error: factor * s.error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ConstrainedModel;
    use alloc::vec;

    fn window(offset: i64, values: &[i64]) -> SpinWindow {
        SpinWindow::from_values(offset, values).unwrap()
    }

    #[test]
    fn decimate_alternating_gives_all_plus() {
        let w = SpinWindow::from_fn(Interval::centered(4), Spin::alternating);
        let d = decimate(&w).unwrap();
        assert_eq!(d.offset(), -2);
        assert_eq!(d.spins(), &[Spin::Up; 5]);
    }

    #[test]
    fn decimate_all_minus() {
        let d = decimate(&SpinWindow::uniform(Interval::new(-3, 6).unwrap(), Spin::Down)).unwrap();
        assert_eq!(d.interval(), Some(Interval::new(-1, 3).unwrap()));
        assert!(d.spins().iter().all(|&s| s == Spin::Down));
    }

    #[test]
    fn decimate_period_four() {
        let w = window(0, &[1, 1, -1, -1, 1, 1, -1, -1, 1]);
        let d = decimate(&w).unwrap();
        assert_eq!(d.offset(), 0);
        assert_eq!(d, SpinWindow::from_fn(Interval::new(0, 4).unwrap(), Spin::alternating));
    }

    #[test]
    fn decimate_odd_offsets() {
        let d = decimate(&window(-3, &[1, -1, 1, 1])).unwrap();
        assert_eq!(d.offset(), -1);
        assert_eq!(d.spins(), &[Spin::Down, Spin::Up]);
        assert_eq!(decimate(&window(5, &[1])), Err(Error::NoEvenSites));
        assert_eq!(decimate(&SpinWindow::new(0, vec![])), Err(Error::NoEvenSites));
    }

    #[test]
    fn probe_constraint_small_example() {
        let g = ProbeGeometry::new(2, 4, Spin::Up).unwrap();
        let c = build_probe_constraint(&g);
        let expect = [(2, Spin::Down), (4, Spin::Up), (6, Spin::Up), (8, Spin::Up)];
        for (x, s) in expect {
            assert_eq!(c.spin_at(x), Some(s), "site {x}");
            assert_eq!(c.spin_at(-x), Some(s), "site {}", -x);
        }
        assert!(c.is_free(0));
        assert_eq!(c.spin_at(0), None);
        assert!(c.free_sites().iter().all(|&x| x == 0 || x % 2 != 0));
        assert_eq!(c.stored(), Interval::centered(16));
        assert_eq!(c.free_sites().len() as u64, g.free_count());
        assert_eq!(g.free_count(), 17);
        // margin evens continue the alternation
        assert_eq!(c.spin_at(10), Some(Spin::Down));
        assert_eq!(c.spin_at(12), Some(Spin::Up));
    }

    #[test]
    fn annulus_sign_only_touches_annulus() {
        let g = ProbeGeometry::with_margin(3, 7, Spin::Up, 5).unwrap();
        let plus = build_probe_constraint(&g);
        let minus = build_probe_constraint(&g.with_annulus_sign(Spin::Down));
        assert_eq!(plus.free_sites(), minus.free_sites());
        for (&x, &s) in plus.frozen() {
            let i = x / 2;
            let expected = if (4..=7).contains(&i.abs()) { -s } else { s };
            assert_eq!(minus.frozen()[&x], expected, "site {x}");
        }
    }

    #[test]
    fn tail_override_fills_margin() {
        let g = ProbeGeometry::with_margin(1, 2, Spin::Down, 4).unwrap();
        let c = build_probe_constraint_with_tail(&g, TailRule::AllPlus);
        assert_eq!(c.spin_at(6), Some(Spin::Up));
        assert_eq!(c.spin_at(-8), Some(Spin::Up));
        assert_eq!(c.spin_at(4), Some(Spin::Down));
        assert_eq!(c.spin_at(2), Some(Spin::Down));
        assert_eq!(c.spin_at(9), Some(Spin::Up));
        assert_eq!(c.tail(), TailRule::AllPlus);
    }

    #[test]
    fn geometry_validation() {
        assert!(ProbeGeometry::new(0, 4, Spin::Up).is_err());
        assert!(ProbeGeometry::new(5, 4, Spin::Up).is_err());
        assert!(ProbeGeometry::with_margin(2, 4, Spin::Up, 0).is_err());
        assert!(ProbeGeometry::new(4, 4, Spin::Up).is_ok());
        assert_eq!(ProbeGeometry::new(2, 4, Spin::Up).unwrap().window_margin(), 8);
    }

    #[test]
    fn rescale_factors() {
        let c = FrozenConstraint::pure_alternating(Interval::centered(9)).unwrap();
        let m2 = constrained_model_rescale(&ModelParams::new(2.0, 1.0, 0.0).unwrap(), &c).unwrap();
        assert_eq!(m2.scale, 0.25);
        let m15 = constrained_model_rescale(&ModelParams::new(1.5, 1.0, 0.0).unwrap(), &c).unwrap();
        assert!((m15.scale - 0.353_553_390_593_273_76).abs() < 1e-15);
        assert!((m15.coupling(2) - 0.125).abs() < 1e-16);
    }

    #[test]
    fn rescale_refuses_annulus() {
        let p = ModelParams::new(1.5, 1.0, 0.0).unwrap();
        let g = ProbeGeometry::new(2, 4, Spin::Up).unwrap();
        let c = build_probe_constraint(&g);
        assert_eq!(constrained_model_rescale(&p, &c), Err(Error::NotPurelyAlternating));
        let plus = FrozenConstraint::pure_alternating(Interval::centered(5)).unwrap().with_tail(TailRule::AllPlus);
        assert_eq!(constrained_model_rescale(&p, &plus), Err(Error::NotPurelyAlternating));
    }

    #[test]
    fn rescaled_hamiltonian_matches_constrained_one() {
        let p = ModelParams::new(1.5, 1.0, 0.0).unwrap();
        let c = FrozenConstraint::pure_alternating(Interval::new(-9, 11).unwrap()).unwrap();
        let r = constrained_model_rescale(&p, &c).unwrap();
        let odd = c.free_sites();
        let spins: Vec<Spin> = (0..odd.len()).map(|k| if k % 3 == 0 { Spin::Down } else { Spin::Up }).collect();
        let model = ConstrainedModel::new(&p, &c, 1_000_000).unwrap();
        let s8: Vec<i8> = spins.iter().map(|s| s.value()).collect();
        let e_model = model.energy(&s8);
        assert!((e_model - r.hamiltonian(&spins)).abs() <= 1e-12 + model.tail_bound());
        assert!(model.fields().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn choose_n_examples() {
        assert_eq!(choose_n(1.5, 10), Ok(100));
        assert_eq!(choose_n(2.0, 10), Ok(10));
        assert_eq!(choose_n(1.25, 4), Ok(256));
        assert_eq!(choose_n(1.5, 1), Ok(1));
        assert_eq!(choose_n(1.3, 2), Ok(11)); // 2^{10/3} = 10.079
        assert_eq!(choose_n(2.5, 10), Err(Error::OutsideDysonRegime(2.5)));
        assert_eq!(choose_n(1.0, 10), Err(Error::OutsideDysonRegime(1.0)));
        assert!(choose_n(1.5, 0).is_err());
    }

    #[test]
    fn choose_n_is_monotone() {
        for alpha in [1.2, 1.3, 1.5, 1.75, 2.0] {
            let ns: Vec<u64> = (1..40).map(|l| choose_n(alpha, l).unwrap()).collect();
            assert!(ns.windows(2).all(|w| w[0] <= w[1]), "alpha {alpha}");
        }
        for l in 2..20 {
            assert!(choose_n(1.4, l).unwrap() >= choose_n(1.6, l).unwrap());
        }
    }

    #[test]
    fn boundary_bound_examples() {
        assert!((boundary_bound(1.5, 10, 100).unwrap() - 4.0).abs() < 1e-14);
        let a = boundary_bound(1.7, 5, 40).unwrap();
        let b = boundary_bound(1.7, 5, 80).unwrap();
        assert!((b / a - powf(2.0, -0.7)).abs() < 1e-14);
        assert!(boundary_bound(1.5, 10, 9).is_err());
        assert!(boundary_bound(1.0, 1, 2).is_err());
    }

    #[test]
    fn bound_with_annulus_law_is_two_over_alpha_minus_one() {
        for l in 1..30u64 {
            let b15 = boundary_bound(1.5, l, choose_n(1.5, l).unwrap()).unwrap();
            assert!((b15 - 4.0).abs() <= 4.0 * 1e-14, "L={l}: {b15}");
            let b2 = boundary_bound(2.0, l, choose_n(2.0, l).unwrap()).unwrap();
            assert!((b2 - 2.0).abs() <= 2.0 * 1e-14);
        }
    }

    /// Direct double sum over `|y| <= N + cut`, plus the integral bound for
    /// what lies beyond.
    fn brute_worst_case(alpha: f64, l: i64, n: i64, cut: i64) -> (f64, f64) {
        let mut s = 0.0;
        for x in -l..=l {
            for y in (n + 1)..=(n + cut) {
                s += 2.0 * (powf((y - x) as f64, -alpha) + powf((y + x) as f64, -alpha));
            }
        }
        let rest = 2.0 * (2 * l + 1) as f64 * 2.0 * powf((n + cut - l) as f64, 1.0 - alpha) / (alpha - 1.0);
        (s, rest)
    }

    #[test]
    fn worst_case_matches_brute_force() {
        for (alpha, l, n) in [(1.5, 2, 4), (2.0, 3, 3), (1.8, 1, 10)] {
            let w = worst_case_boundary_energy(alpha, l, n).unwrap();
            let (s, rest) = brute_worst_case(alpha, l as i64, n as i64, 200_000);
            assert!(w.value >= s && w.value <= s + rest, "{alpha} {l} {n}: {} vs {s}+{rest}", w.value);
            assert!(w.error < 1e-12);
        }
    }

    #[test]
    fn rigorous_bound_dominates_worst_case() {
        for alpha in [1.2, 1.5, 1.8, 2.0, 3.0] {
            for l in [1, 2, 5, 10] {
                for n in [l, l + 1, 2 * l, 10 * l, 100 * l] {
                    let w = worst_case_boundary_energy(alpha, l, n).unwrap();
                    let r = rigorous_boundary_bound(alpha, l, n).unwrap();
                    assert!(r >= w.value + w.error, "{alpha} {l} {n}: {r} < {}", w.value);
                }
            }
        }
    }

    #[test]
    fn homogeneous_field_values() {
        let f1 = homogeneous_field_f(2.0, 1).unwrap();
        assert!((f1.value - 0.467_401_100_272_339_655).abs() < 1e-12);
        assert!(f1.error <= 1e-10);
        let f0 = homogeneous_field_f(2.0, 0).unwrap();
        assert!((f0.value - 2.467_401_100_272_339_655).abs() < 1e-12);
        let f = homogeneous_field_f(1.5, 4).unwrap();
        assert!((f.value - 0.705_746_906_219_954_872).abs() < 1e-12);
        for alpha in [1.1, 1.5, 2.0] {
            let v: Vec<f64> = (0..20).map(|l| homogeneous_field_f(alpha, l).unwrap().value).collect();
            assert!(v.windows(2).all(|w| w[1] < w[0]));
            assert!(homogeneous_field_f(alpha, 0).unwrap().error <= 1e-10);
        }
        assert!(homogeneous_field_f(1.0, 3).is_err());
    }

    #[test]
    fn homogeneous_field_partial_sum_oracle() {
        let alpha = 1.75;
        let l = 3u64;
        let k_max = 2_000_000u64;
        let mut s = 0.0;
        for k in (l..k_max).rev() {
            s += 2.0 * powf((2 * k + 1) as f64, -alpha);
        }
        // 2 sum_{k >= K} (2k+1)^-a lies between the integrals from K and K-1.
        let lo = powf((2 * k_max + 1) as f64, 1.0 - alpha) / (alpha - 1.0);
        let hi = powf((2 * k_max - 1) as f64, 1.0 - alpha) / (alpha - 1.0);
        let f = homogeneous_field_f(alpha, l).unwrap().value;
        assert!(f >= s + lo - 1e-12 && f <= s + hi + 1e-12, "{f} vs [{}, {}]", s + lo, s + hi);
    }

    #[test]
    fn image_and_preimage() {
        assert_eq!(PrimedSite(-3).preimage(), Site(-6));
        assert_eq!(Site(-6).image(), Some(PrimedSite(-3)));
        assert_eq!(Site(-5).image(), None);
    }
}
