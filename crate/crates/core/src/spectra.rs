//! Explicit spectrum families, deformations, and membership predicates.
//!
//! Everything here stays rational: family parameters g, ratios rho, and the
//! deformation data are rationals, so each produced point is exact and each
//! membership test is a finite chain of exact comparisons.

use crate::builder::{BuildError, SelfSimilarSeed};
use crate::exactnum::{geometric_sum, ExtReal, Rational};
use crate::invariants::{chi_pair_periodic, SpectrumPoint};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, thiserror::Error)]
pub enum SpectraError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("gate {name} fails: value {value} has the wrong sign")]
    GateFailed { name: &'static str, value: Rational },
    #[error("epsilon = {eps} breaks the ordering constraints: {detail}")]
    EpsilonTooLarge { eps: Rational, detail: String },
    #[error("nu image of the wrap point is not proportional to the image of point 1 (coordinate {coordinate})")]
    NotProportional { coordinate: usize },
    #[error("family construction is internally inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn int(v: i64) -> Rational {
    Rational::from_int(v)
}

/// The one-point family behind the constructed region of every S_{n-m,n}:
/// coordinates (1, g, ..., g^{m-1}, g^{m-1}, ..., g^{n-2}) scaled by rho.
/// Returns the exact point
///
/// ```text
/// alpha = (g^{m-1} + ... + g^{n-2}) / (1 + ... + g^{m-1}),   beta = rho * alpha
/// ```
///
/// together with the seed when one exists. For g = 1 with n >= 3 the point
/// collapses onto the Dirichlet corner and the all-ones vector is not a
/// valid prescription (it has no strict part), and rho = 1 cannot wrap; in
/// both cases the seed is `None` and only the point is returned.
pub fn regular_family_seed(
    n: usize,
    m_cons: usize,
    g: Rational,
    rho: Rational,
) -> Result<(Option<SelfSimilarSeed>, SpectrumPoint), SpectraError> {
    if n < 2 || m_cons < 1 || m_cons >= n {
        return Err(SpectraError::BadParameter(format!(
            "need 1 <= m = {m_cons} < n = {n}, n >= 2"
        )));
    }
    if g < int(1) {
        return Err(SpectraError::BadParameter(format!("g = {g} must be at least 1")));
    }
    if rho < g {
        return Err(SpectraError::BadParameter(format!("rho = {rho} must be at least g = {g}")));
    }
    let m = m_cons;
    let mut point = Vec::with_capacity(n);
    for i in 0..m {
        point.push(g.pow(i as i32));
    }
    for i in m - 1..n - 1 {
        point.push(g.pow(i as i32));
    }
    let lower: Rational = point[..m].iter().sum();
    let upper: Rational = point[m..].iter().sum();
    let alpha = upper / lower;
    let beta = &rho * &alpha;
    let result = SpectrumPoint::finite(alpha, beta).expect("rho >= 1 orders the pair");

    let degenerate = rho == int(1) || (g == int(1) && n > 2);
    let seed = if degenerate {
        None
    } else {
        let seed = SelfSimilarSeed::new(m, rho, vec![point])?;
        assert_eq!(chi_pair_periodic(&seed), result, "closed form disagrees with the seed");
        Some(seed)
    };
    Ok((seed, result))
}

/// The 5-component family witnessing alpha = g^2 + 1 - g/(1+rho) on the
/// boundary side of S_{3,5}, with rho = g^s. Its chain data
///
/// ```text
/// b_i = g^{i-1}(1+rho) - rho,   d_1 = alpha(1+rho) - rho - b_2,
/// d_i = alpha(rho + b_i) - b_i - d_{i-1}
/// ```
///
/// must satisfy rho + b_i < d_{i-1} < b_{i+1}; that is re-checked here even
/// though it is automatic for g >= 2.
pub fn s35_family_seed(
    g: Rational,
    s: usize,
) -> Result<(SelfSimilarSeed, SpectrumPoint), SpectraError> {
    if g < int(2) {
        return Err(SpectraError::BadParameter(format!("g = {g} must be at least 2")));
    }
    if s < 3 {
        return Err(SpectraError::BadParameter(format!("s = {s} must be at least 3")));
    }
    let rho = g.pow(s as i32);
    let one_plus_rho = int(1) + &rho;
    let alpha = &g * &g + int(1) - &g / &one_plus_rho;

    // b[i] holds b_{i+2}: indices 2..=s+1 of the recursion
    let b: Vec<Rational> =
        (2..=s + 1).map(|i| g.pow(i as i32 - 1) * &one_plus_rho - &rho).collect();
    assert_eq!(b[s - 1], &rho * &rho, "b_{{s+1}} must close at rho^2");
    let mut d: Vec<Rational> = vec![&alpha * &one_plus_rho - &rho - &b[0]];
    for i in 2..s {
        let next = &alpha * (&rho + &b[i - 2]) - &b[i - 2] - &d[i - 2];
        d.push(next);
    }

    for i in 2..=s {
        let (lo, mid, hi) = (&rho + &b[i - 2], &d[i - 2], &b[i - 1]);
        if !(&lo < mid && mid < hi) {
            return Err(SpectraError::Inconsistent(format!(
                "chain inequality fails at i = {i}: {lo} < {mid} < {hi}"
            )));
        }
    }

    let mut points = Vec::with_capacity(s);
    points.push(vec![int(1), rho.clone(), rho.clone(), b[0].clone(), d[0].clone()]);
    for i in 2..s {
        points.push(vec![
            rho.clone(),
            b[i - 2].clone(),
            b[i - 2].clone(),
            d[i - 2].clone(),
            d[i - 1].clone(),
        ]);
    }
    points.push(vec![
        rho.clone(),
        b[s - 2].clone(),
        b[s - 2].clone(),
        &rho * &rho,
        &rho * &b[0],
    ]);

    let seed = SelfSimilarSeed::new(2, rho, points)?;
    let expected = SpectrumPoint::finite(alpha.clone(), &g * &alpha).expect("g >= 2");
    let computed = chi_pair_periodic(&seed);
    if computed != expected {
        return Err(SpectraError::Inconsistent(format!(
            "chi pair {computed:?} differs from the closed form {expected:?}"
        )));
    }
    Ok((seed, expected))
}

/// One sample of the boundary arc g -> ((3/2)g^2 - g + 1)(1, g) of S_{3,5}.
#[derive(Clone, Debug)]
pub struct ArcSample {
    pub seed: SelfSimilarSeed,
    /// exact chi pair of the epsilon-perturbed seed
    pub point: SpectrumPoint,
    /// the arc point the samples converge to as epsilon shrinks
    pub target: SpectrumPoint,
}

/// The epsilon-perturbed 5-point seed realizing arc samples near
/// alpha = (3/2)g^2 - g + 1, beta = g*alpha, for g in [1.798, 1.839].
/// The interval endpoints come from two polynomial gates:
/// 3g^3 - 7g^2 + 4g - 2 >= 0 (so c <= c' and the points are ordered) and
/// g^3 - g^2 - g - 1 <= 0 (so the stray cross ratio stays below g*alpha).
pub fn s35_arc2_seed(g: Rational, eps: Rational) -> Result<ArcSample, SpectraError> {
    if !eps.is_positive() {
        return Err(SpectraError::BadParameter(format!("epsilon = {eps} must be positive")));
    }
    let gate1 = int(3) * g.pow(3) - int(7) * &g * &g + int(4) * &g - int(2);
    if gate1.is_negative() {
        return Err(SpectraError::GateFailed { name: "3g^3-7g^2+4g-2", value: gate1 });
    }
    let gate2 = g.pow(3) - &g * &g - &g - int(1);
    if gate2.is_positive() {
        return Err(SpectraError::GateFailed { name: "g^3-g^2-g-1", value: gate2 });
    }

    let alpha = int(3) * &g * &g / int(2) - &g + int(1);
    let rho = &g / (int(2) - &g);
    let a = int(2) * (&alpha - &g) / &g;
    let b = int(2) * &g - int(1);
    let c = int(2) * (&alpha - &g);
    let c_prime = (&rho + int(1) - &g) / &g;
    let d = int(2) * &alpha * (&g - int(1)) + int(1);

    let one = int(1);
    let one_eps = &one + &eps;
    let points = vec![
        vec![rho.recip(), one.clone(), one.clone(), one_eps.clone(), a],
        vec![one.clone(), one_eps.clone(), one_eps.clone(), b.clone(), c.clone()],
        vec![one.clone(), b.clone(), b.clone(), c.clone(), d.clone()],
        vec![one.clone(), c_prime.clone(), c_prime.clone(), rho.clone(), &rho * &one_eps],
    ];

    let seed = SelfSimilarSeed::new(2, rho, points).map_err(|source| {
        SpectraError::EpsilonTooLarge { eps: eps.clone(), detail: source.to_string() }
    })?;
    let point = chi_pair_periodic(&seed);
    let target = SpectrumPoint::finite(alpha.clone(), &g * &alpha).expect("g > 1");
    Ok(ArcSample { seed, point, target })
}

/// An increasing piecewise-linear reparametrization of the value axis.
/// Both shapes are identity near 0 and eventually linear, which keeps the
/// image of a periodic sequence periodic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NuSpec {
    /// nu(t) = t up to the threshold, then c*t; nu(t)/t is non-decreasing.
    ScaleAbove { threshold: Rational, c: Rational },
    /// nu(t) = t up to `low`, slope eps on [low, high], then c*t with
    /// c = (1-eps)*low/high + eps; nu(t)/t is non-increasing.
    Flatten { low: Rational, high: Rational, eps: Rational },
}

impl NuSpec {
    pub fn scale_above(threshold: Rational, c: Rational) -> Result<Self, SpectraError> {
        if !threshold.is_positive() {
            return Err(SpectraError::BadParameter(format!(
                "threshold = {threshold} must be positive"
            )));
        }
        if c < int(1) {
            return Err(SpectraError::BadParameter(format!("c = {c} must be at least 1")));
        }
        Ok(NuSpec::ScaleAbove { threshold, c })
    }

    pub fn flatten(low: Rational, high: Rational, eps: Rational) -> Result<Self, SpectraError> {
        if !low.is_positive() || low >= high {
            return Err(SpectraError::BadParameter(format!(
                "need 0 < low < high, got low = {low}, high = {high}"
            )));
        }
        if !eps.is_positive() || eps > int(1) {
            return Err(SpectraError::BadParameter(format!("eps = {eps} must lie in (0, 1]")));
        }
        Ok(NuSpec::Flatten { low, high, eps })
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        match self {
            NuSpec::ScaleAbove { threshold, c } => {
                if t <= threshold {
                    t.clone()
                } else {
                    c * t
                }
            }
            NuSpec::Flatten { low, high, eps } => {
                if t <= low {
                    t.clone()
                } else if t <= high {
                    (int(1) - eps) * low + eps * t
                } else {
                    let c = (int(1) - eps) * low / high + eps;
                    c * t
                }
            }
        }
    }

    /// Whether nu(t)/t is non-decreasing (else it is non-increasing).
    fn ratio_non_decreasing(&self) -> bool {
        matches!(self, NuSpec::ScaleAbove { .. })
    }
}

/// Transform a seed coordinate-wise by nu. The images must wrap: the image
/// of rho * point_1 has to be a scalar multiple of the image of point_1,
/// and that scalar is the new ratio. The monotonicity law for the chi pair
/// (up for non-decreasing nu(t)/t, down otherwise) is asserted.
pub fn apply_nu(
    seed: &SelfSimilarSeed,
    nu: &NuSpec,
) -> Result<(SelfSimilarSeed, SpectrumPoint), SpectraError> {
    let images: Vec<Vec<Rational>> =
        seed.points().iter().map(|p| p.iter().map(|t| nu.eval(t)).collect()).collect();
    let wrap_image: Vec<Rational> =
        seed.points()[0].iter().map(|t| nu.eval(&(seed.rho() * t))).collect();

    let rho_new = &wrap_image[0] / &images[0][0];
    for (j, w) in wrap_image.iter().enumerate() {
        if &(&rho_new * &images[0][j]) != w {
            return Err(SpectraError::NotProportional { coordinate: j + 1 });
        }
    }

    let new_seed = SelfSimilarSeed::new(seed.m(), rho_new, images)?;
    let before = chi_pair_periodic(seed);
    let after = chi_pair_periodic(&new_seed);
    if nu.ratio_non_decreasing() {
        assert!(
            after.alpha >= before.alpha && after.beta >= before.beta,
            "chi pair decreased under a non-decreasing nu(t)/t"
        );
    } else {
        assert!(
            after.alpha <= before.alpha && after.beta <= before.beta,
            "chi pair increased under a non-increasing nu(t)/t"
        );
    }
    Ok((new_seed, after))
}

/// Replicate a seed to (2r+1) periods with the smallest r >= 1 for which
/// a_n^(1) < rho^r * a_1^(1). The replicated seed produces the same chi
/// pair and leaves a full period of slack on both sides of its middle
/// period, which is what the rectangle deformations need.
pub fn rectangle_extend(seed: &SelfSimilarSeed) -> SelfSimilarSeed {
    let first = &seed.points()[0];
    let top = first.last().unwrap();
    let mut r = 1usize;
    let mut scale = seed.rho().clone();
    while &(&scale * &first[0]) <= top {
        scale = &scale * seed.rho();
        r += 1;
    }
    let periods = 2 * r + 1;
    let mut points = seed.unfolded_points(periods);
    points.pop(); // drop the closing wrap point
    let rho_new = seed.rho().pow(periods as i32);
    let extended = SelfSimilarSeed::new(seed.m(), rho_new, points)
        .expect("replication preserves validity");
    debug_assert_eq!(chi_pair_periodic(&extended), chi_pair_periodic(seed));
    extended
}

/// Spectrum regions with exactly decidable membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// best vs uniform for m = 1: (n-1) >= 1/alpha >= sum (alpha/beta)^i
    S1n(usize),
    /// best vs uniform for m = n-1: n-1 <= alpha <= sum (beta/alpha)^i
    Sn1n(usize),
    /// S_{2,4} exactly: 1 <= alpha^2 <= beta
    S24,
    /// the alpha >= 5 part of S_{3,5}: alpha <= (beta/alpha)^2 + 1
    S35High,
    /// the constructed subset of S_{m,n} (conjectured equal for all m, n;
    /// false for S_{3,5})
    Conjecture { m: usize, n: usize },
    /// the simultaneous spectrum of (omega_0, ..., omega_{n-2}); the vector
    /// is the point under test and the pair argument is ignored
    OmegaSpectrum { n: usize, vector: Vec<ExtReal> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    In,
    Out,
    /// the region only describes part of the spectrum and the point falls
    /// outside the described part
    OutsideScope,
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In)
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Membership::In
        } else {
            Membership::Out
        }
    }
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Membership::In => write!(f, "in"),
            Membership::Out => write!(f, "out"),
            Membership::OutsideScope => write!(f, "outside-scope"),
        }
    }
}

pub fn membership(region: &Region, point: &SpectrumPoint) -> Membership {
    match region {
        Region::S1n(n) => Membership::from_bool(s1n_contains(*n, point)),
        Region::Sn1n(n) => Membership::from_bool(sn1n_contains(*n, point)),
        Region::S24 => Membership::from_bool(s24_contains(point)),
        Region::S35High => s35_high(point),
        Region::Conjecture { m, n } => Membership::from_bool(conjecture_contains(*m, *n, point)),
        Region::OmegaSpectrum { n, vector } => {
            Membership::from_bool(omega_spectrum_contains(*n, vector))
        }
    }
}

fn s1n_contains(n: usize, point: &SpectrumPoint) -> bool {
    assert!(n >= 2);
    let ExtReal::Finite(alpha) = &point.alpha else { return false };
    if !alpha.is_positive() {
        return false;
    }
    // n-1 >= 1/alpha, i.e. (n-1) alpha >= 1
    if int(n as i64 - 1) * alpha < int(1) {
        return false;
    }
    match &point.beta {
        // the half-line (alpha, infinity) exists only up to alpha = 1
        ExtReal::Infinity => alpha <= &int(1),
        ExtReal::Finite(beta) => {
            if !beta.is_positive() {
                return false;
            }
            alpha.recip() >= geometric_sum(&(alpha / beta), n - 1)
        }
    }
}

fn sn1n_contains(n: usize, point: &SpectrumPoint) -> bool {
    assert!(n >= 2);
    let ExtReal::Finite(alpha) = &point.alpha else { return true };
    if alpha < &int(n as i64 - 1) {
        return false;
    }
    match &point.beta {
        ExtReal::Infinity => true,
        ExtReal::Finite(beta) => alpha <= &geometric_sum(&(beta / alpha), n - 1),
    }
}

fn s24_contains(point: &SpectrumPoint) -> bool {
    let ExtReal::Finite(alpha) = &point.alpha else { return true };
    if alpha < &int(1) {
        return false;
    }
    match &point.beta {
        ExtReal::Infinity => true,
        ExtReal::Finite(beta) => &(alpha * alpha) <= beta,
    }
}

fn s35_high(point: &SpectrumPoint) -> Membership {
    let alpha = match &point.alpha {
        ExtReal::Infinity => return Membership::In,
        ExtReal::Finite(a) => a,
    };
    if alpha < &int(5) {
        return Membership::OutsideScope;
    }
    match &point.beta {
        ExtReal::Infinity => Membership::In,
        ExtReal::Finite(beta) => {
            let g = beta / alpha;
            Membership::from_bool(alpha <= &(&g * &g + int(1)))
        }
    }
}

fn conjecture_contains(m: usize, n: usize, point: &SpectrumPoint) -> bool {
    assert!(m >= 1 && m < n);
    let ExtReal::Finite(alpha) = &point.alpha else {
        // (infinity, infinity) is reachable whenever the alpha interval is
        // unbounded, which happens exactly for m >= 2
        return m >= 2;
    };
    if !alpha.is_positive() || int(m as i64) > alpha * int((n - m) as i64) {
        return false;
    }
    match &point.beta {
        ExtReal::Infinity => m >= 2 || alpha <= &int(1),
        ExtReal::Finite(beta) => {
            let down = geometric_sum(&(alpha / beta), n - m);
            let up = geometric_sum(&(beta / alpha), m);
            alpha * down <= up
        }
    }
}

/// Exact test of the (n-1)-dimensional omega spectrum:
/// beta_0 >= 1/(n-1) and, for 1 <= j <= n-2,
/// j*beta_j/(beta_j + j + 1) <= beta_{j-1} <= ((n-1-j)*beta_j - 1)/(n-j),
/// where the left bound reads j when beta_j is infinite.
pub fn omega_spectrum_contains(n: usize, vector: &[ExtReal]) -> bool {
    assert!(n >= 2, "need n >= 2");
    assert_eq!(vector.len(), n - 1, "the omega spectrum of dimension n has n-1 coordinates");
    let first_ok = match &vector[0] {
        ExtReal::Infinity => true,
        ExtReal::Finite(b0) => b0 * int(n as i64 - 1) >= int(1),
    };
    if !first_ok {
        return false;
    }
    for j in 1..=n - 2 {
        let (prev, cur) = (&vector[j - 1], &vector[j]);
        let ji = int(j as i64);
        let lower_ok = match (cur, prev) {
            (_, ExtReal::Infinity) => true,
            (ExtReal::Infinity, ExtReal::Finite(p)) => p >= &ji,
            (ExtReal::Finite(c), ExtReal::Finite(p)) => &ji * c <= p * (c + &ji + int(1)),
        };
        // the upper bound ((n-1-j) beta_j - 1)/(n-j) is infinite only with
        // beta_j, since n-1-j >= 1 here
        let upper_ok = match (cur, prev) {
            (ExtReal::Infinity, _) => true,
            (ExtReal::Finite(_), ExtReal::Infinity) => false,
            (ExtReal::Finite(c), ExtReal::Finite(p)) => {
                p * int((n - j) as i64) <= c * int((n - 1 - j) as i64) - int(1)
            }
        };
        if !lower_ok || !upper_ok {
            return false;
        }
    }
    true
}
