//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.
//!
//! Criteria listed in `KNOWN_RED` are reported as failing without aborting the run; the
//! analysis is printed with the line.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subspace_lab::arith::algebraic::parse_algebraic_real;
use subspace_lab::arith::enclosure::pow_rational;
use subspace_lab::arith::{int, product_formula_check, rat, NfElem, Place, Power};
use subspace_lab::bounds::{comparison_table, schmidt89_bound, theorem21_bound, theorem21_window_total_for, BoundValue};
use subspace_lab::filtration::{cubic_solutions_from_u, cubic_system, exceptional_subspace};
use subspace_lab::gap::{covering_intervals, partition_assign, subspace_cover, verify_class_determinant, window_subspace, PartitionParameter};
use subspace_lab::linalg::{ComplexRational, Subspace};
use subspace_lab::roth::{audit_gap_principle, scan_roth};
use subspace_lab::systems::{enumerate_solutions, FormSystem, PlaceBlock};
use subspace_lab::{AlgebraicReal, Rational, RealEnclosure};

/// Criteria expected to fail, with the reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    8,
    "the window total m(1 + [log ω / log(1 + δ/2n)]) + 1 exceeds the closed-form bound at small n: \
     log(1 + δ/2n) < δ/2n costs a factor above 2n/10 and log ω carries an extra log 3n",
)];

/// Wall-clock limits.
const ROTH_LIMIT: Duration = Duration::from_secs(120);
const WINDOW_LIMIT: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn xi(name: &str) -> AlgebraicReal {
    let text = match name {
        "sqrt2" => "poly=[-2,0,1];interval=[1,2]",
        "cbrt2" => "poly=[-2,0,0,1];interval=[1,2]",
        "phi" => "poly=[-1,-1,1];interval=[1,2]",
        // the root of X³ - 1000X - 1 near -1/1000
        "tiny" => "poly=[-1,-1000,0,1];interval=[-1/500,0]",
        _ => unreachable!(),
    };
    parse_algebraic_real(text).unwrap()
}

// ---- criterion 1 and 2 ----

/// Continued fraction convergents with denominator at most `b`, from a 1024-bit enclosure.
fn oracle_convergents(x: &AlgebraicReal, b: i64) -> Vec<Rational> {
    let (mut lo, mut hi) = x.refine(1024);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    let mut out = Vec::new();
    loop {
        let a = lo.floor().to_integer();
        assert_eq!(a, hi.floor().to_integer(), "enclosure too wide for the oracle");
        let (p, q) = (&a * &p0 + &p1, &a * &q0 + &q1);
        if q > BigInt::from(b) {
            return out;
        }
        out.push(Rational::new(p.clone(), q.clone()));
        (p1, q1, p0, q0) = (p0, q0, p, q);
        let ar = Rational::from_integer(a);
        (lo, hi) = ((hi - &ar).recip(), (lo - &ar).recip());
    }
}

/// `|ξ - α|^c·H^(2c+a) <= 1` for `δ = a/c`, refined until decided.
fn oracle_is_solution(x: &AlgebraicReal, alpha: &Rational, delta: &Rational) -> bool {
    let h = Rational::from_integer(alpha.numer().abs().max(alpha.denom().clone()));
    let (a, c) = (delta.numer().to_i64().unwrap(), delta.denom().to_i64().unwrap());
    let scale = pow_rational(&h, 2 * c + a);
    for bits in [64, 256, 1024, 4096] {
        let (lo, hi) = x.refine(bits);
        let (l, u) = (lo - alpha, hi - alpha);
        let (near, far) = if l.is_positive() {
            (l, u)
        } else if u.is_negative() {
            (-u, -l)
        } else {
            (Rational::zero(), l.abs().max(u.abs()))
        };
        if pow_rational(&near, c) * &scale > Rational::one() {
            return false;
        }
        if pow_rational(&far, c) * &scale <= Rational::one() {
            return true;
        }
    }
    panic!("oracle undecided at {alpha}");
}

/// A solution `p/q` with `q > 2^(1/δ)` satisfies `|ξ - p/q| < 1/(2q²)` and is a convergent, so
/// only small denominators need a direct scan.
fn oracle_roth(x: &AlgebraicReal, delta: &Rational, b: i64) -> BTreeSet<Rational> {
    let mut candidates: BTreeSet<Rational> = oracle_convergents(x, b).into_iter().collect();
    let small_q = (1..).take_while(|q: &i64| pow_rational(&int(*q), delta.numer().to_i64().unwrap()) <= pow_rational(&int(2), delta.denom().to_i64().unwrap())).last().unwrap_or(1);
    let (lo, hi) = x.refine(64);
    for q in 1..=small_q {
        let qr = int(q);
        let first: BigInt = (&qr * &lo).floor().to_integer() - 1;
        let last = (&qr * &hi).ceil().to_integer() + 1;
        let mut p = first;
        while p <= last {
            candidates.insert(Rational::new(p.clone(), BigInt::from(q)));
            p += 1;
        }
    }
    candidates
        .into_iter()
        .filter(|a| a.numer().abs().max(a.denom().clone()) <= BigInt::from(b))
        .filter(|a| oracle_is_solution(x, a, delta))
        .collect()
}

fn criteria_1_and_2() -> (Outcome, Outcome) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut discrepancies = Vec::new();
    let mut audit_failures = Vec::new();
    let mut total = 0;
    let mut scan_time = Duration::ZERO;
    for name in ["sqrt2", "cbrt2", "phi"] {
        let x = xi(name);
        for delta in [rat(1, 2), int(1)] {
            let t = Instant::now();
            let scan = pool.install(|| scan_roth(&x, &delta, &BigInt::from(500))).unwrap();
            scan_time += t.elapsed();
            let got: BTreeSet<Rational> = scan.iter().map(|s| s.alpha.clone()).collect();
            let want = oracle_roth(&x, &delta, 500);
            total += got.len();
            if got != want {
                discrepancies.push(format!("{name} δ={delta}: scan {got:?} oracle {want:?}"));
            }
            let v = audit_gap_principle(&scan, &delta).unwrap();
            if !v.is_empty() {
                audit_failures.push(format!("{name} δ={delta}: {} violations", v.len()));
            }
        }
    }
    let c1 = outcome(
        discrepancies.is_empty() && scan_time < ROTH_LIMIT,
        format!("6 scans at B=500, {total} solutions, {} discrepancies, scans {:.2?} single-threaded {}", discrepancies.len(), scan_time, discrepancies.join("; ")),
    );
    let c2 = outcome(audit_failures.is_empty(), format!("gap audit empty on all 6 scans {}", audit_failures.join("; ")));
    (c1, c2)
}

// ---- criterion 3 ----

fn criterion_3() -> Outcome {
    let x = xi("cbrt2");
    let mut bad = Vec::new();
    let mut count = 0;
    for delta in [rat(1, 4), rat(1, 2), int(1)] {
        let r = exceptional_subspace(&cubic_system(&x, &delta).unwrap()).unwrap();
        for c in &r.candidates {
            count += 1;
            let want = if c.subspace.is_zero() { -&delta / int(3) } else { int(1) };
            if c.mu != want {
                bad.push(format!("δ={delta} dim {}: μ={} want {want}", c.subspace.dim(), c.mu));
            }
        }
        if !r.u0.is_zero() || !r.semistable || r.mu0 != -&delta / int(3) || !r.diagnostics.is_empty() {
            bad.push(format!("δ={delta}: U₀ dim {}, semistable {}, μ₀ {}", r.u0.dim(), r.semistable, r.mu0));
        }
    }
    outcome(bad.is_empty(), format!("{count} candidate slopes over δ ∈ {{1/4, 1/2, 1}} {}", bad.join("; ")))
}

// ---- criterion 4 ----

/// `|x₁| <= H(x)`, `|x₂| <= H(x)^(-1-δ)`, with threshold `2^(4/δ)`.
fn line_system(delta: Rational) -> FormSystem {
    let block = PlaceBlock {
        place: Place::Infinity,
        forms: vec![vec![NfElem::integer(1), NfElem::integer(0)], vec![NfElem::integer(0), NfElem::integer(1)]],
        exponents: vec![int(1), -(int(1) + &delta)],
        constant: int(1),
    };
    FormSystem::new(2, delta, None, vec![block], None).unwrap()
}

/// Window starts: the threshold and every solution height past it.
fn window_checks(sys: &FormSystem, b: i64) -> Result<(usize, usize, usize), String> {
    let e = enumerate_solutions(sys, &BigInt::from(b)).map_err(|e| e.to_string())?;
    if !e.boundary.is_empty() {
        return Err(format!("{} undecided candidates", e.boundary.len()));
    }
    let n = sys.n as i64;
    let threshold = Power::new(int(n), int(2 * n) / &sys.delta).unwrap();
    let mut starts: BTreeSet<Rational> = e
        .solutions
        .iter()
        .map(|s| Rational::from_integer(s.height.clone()))
        .filter(|h| threshold.cmp_rational(h).unwrap().is_le())
        .collect();
    if let Some(t) = threshold.exact() {
        starts.insert(t.ceil());
    }
    let mut members = 0;
    for q in &starts {
        let w = window_subspace(sys, &e.solutions, q).map_err(|e| e.to_string())?;
        if w.subspace.is_full() || !w.threshold_met {
            return Err(format!("window at {q} spans dimension {}", w.subspace.dim()));
        }
        let rows: Vec<Vec<BigInt>> = w.members.clone();
        if rows.len() >= sys.n && !all_minors_vanish(&rows, sys.n) {
            return Err(format!("nonzero determinant in the window at {q}"));
        }
        members += w.members.len();
    }
    Ok((e.solutions.len(), starts.len(), members))
}

/// Every `n × n` minor of the member matrix is zero, recomputed by cofactor expansion.
fn all_minors_vanish(rows: &[Vec<BigInt>], n: usize) -> bool {
    fn det(m: &[Vec<BigInt>]) -> BigInt {
        if m.len() == 1 {
            return m[0][0].clone();
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, c)| c.clone()).collect()).collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 { t } else { -t }
            })
            .sum()
    }
    let k = rows.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let m: Vec<Vec<BigInt>> = idx.iter().map(|&i| rows[i].clone()).collect();
        if !det(&m).is_zero() {
            return false;
        }
        let mut i = n;
        while i > 0 && idx[i - 1] == k - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn criterion_4() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let start = Instant::now();
    let cubic = pool.install(|| window_checks(&cubic_system(&xi("cbrt2"), &rat(1, 2)).unwrap(), 200));
    let elapsed = start.elapsed();
    let line = pool.install(|| window_checks(&line_system(int(1)), 300));
    match (cubic, line) {
        (Ok((sols, windows, members)), Ok((lsols, lwindows, lmembers))) => outcome(
            elapsed < WINDOW_LIMIT,
            format!(
                "2^(1/3), δ=1/2, B=200: {sols} solutions, {windows} windows past 3^12 with {members} members (vacuous), {elapsed:.2?}; \
                 line system, δ=1, B=300: {lsols} solutions, {lwindows} windows past 16 with {lmembers} members, all proper"
            ),
        ),
        (c, l) => outcome(false, format!("cubic {:?}, line {:?}", c.err(), l.err())),
    }
}

// ---- criterion 5 ----

fn random_gaussian(rng: &mut ChaCha8Rng, size: i64) -> ComplexRational {
    let mut part = || Rational::new(BigInt::from(rng.gen_range(-size..=size)), BigInt::from(rng.gen_range(1..=8i64)));
    ComplexRational::new(part(), part())
}

fn nonzero_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<ComplexRational> {
    loop {
        let y: Vec<ComplexRational> = (0..n).map(|_| random_gaussian(rng, 50)).collect();
        if y.iter().any(|c| !c.re.is_zero() || !c.im.is_zero()) {
            return y;
        }
    }
}

/// `det` by permutation expansion and `∏ max_i |y_i|²`, both squared moduli.
fn oracle_det_inequality(ys: &[Vec<ComplexRational>], m_squared: &Rational) -> bool {
    let n = ys.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = ComplexRational::new(Rational::zero(), Rational::zero());
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term = ComplexRational::new(Rational::one(), Rational::zero());
        for (i, &j) in p.iter().enumerate() {
            term *= ys[i][j].clone();
        }
        det = if inversions % 2 == 0 { det.clone() + term } else { det.clone() - term };
    });
    let norm2 = |c: &ComplexRational| &c.re * &c.re + &c.im * &c.im;
    let norms: Rational = ys.iter().map(|y| y.iter().map(norm2).max().unwrap()).product();
    norm2(&det) * m_squared <= norms
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mut failures = Vec::new();
    let (mut assigned, mut tuples, mut scalings) = (0, 0, 0);
    for n in [2usize, 3] {
        let params = [
            PartitionParameter::from_m(int(2)).unwrap(),
            PartitionParameter::from_m(int(10)).unwrap(),
            PartitionParameter::for_small_solutions(n),
        ];
        for m in &params {
            // clusters of nearby vectors, so that classes hold several members
            let mut classes: BTreeMap<String, Vec<Vec<ComplexRational>>> = BTreeMap::new();
            for _ in 0..10_000 / 6 / 8 + 1 {
                let base = nonzero_vector(&mut rng, n);
                for _ in 0..8 {
                    let y: Vec<ComplexRational> = base.iter().map(|c| c.clone() + random_gaussian(&mut rng, 1) * ComplexRational::new(rat(1, 64), Rational::zero())).collect();
                    if y.iter().all(|c| c.re.is_zero() && c.im.is_zero()) {
                        continue;
                    }
                    let class = partition_assign(&y, m).unwrap();
                    assigned += 1;
                    classes.entry(class.to_string()).or_default().push(y);
                }
            }
            let full: Vec<&Vec<Vec<ComplexRational>>> = classes.values().filter(|v| v.len() >= n).collect();
            for _ in 0..1000 / 6 + 1 {
                let group = full[rng.gen_range(0..full.len())];
                let mut picks: Vec<usize> = Vec::new();
                while picks.len() < n {
                    let i = rng.gen_range(0..group.len());
                    if !picks.contains(&i) {
                        picks.push(i);
                    }
                }
                let sample: Vec<Vec<ComplexRational>> = picks.iter().map(|&i| group[i].clone()).collect();
                tuples += 1;
                let lib = verify_class_determinant(&sample, m).unwrap();
                let oracle = oracle_det_inequality(&sample, m.square());
                if !lib || !oracle {
                    failures.push(format!("n={n} M={m}: library {lib}, oracle {oracle}"));
                }
            }
            for _ in 0..1000 / 6 + 1 {
                let y = nonzero_vector(&mut rng, n);
                let lambda = loop {
                    let l = random_gaussian(&mut rng, 20);
                    if !(l.re.is_zero() && l.im.is_zero()) {
                        break l;
                    }
                };
                let scaled: Vec<ComplexRational> = y.iter().map(|c| c.clone() * lambda.clone()).collect();
                scalings += 1;
                if partition_assign(&y, m).unwrap() != partition_assign(&scaled, m).unwrap() {
                    failures.push(format!("n={n} M={m}: class changes under scaling by {lambda}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{assigned} vectors assigned, {tuples} same-class tuples, {scalings} scalings, {} failures {}", failures.len(), failures.join("; ")),
    )
}

// ---- criterion 6 ----

fn cross(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det3(a: &[Rational], b: &[Rational], c: &[Rational]) -> Rational {
    dot(a, &cross(b, c))
}

fn p_abs(x: &Rational, p: i64) -> Rational {
    let count = |v: &BigInt| {
        let (mut v, mut k) = (v.abs(), 0i64);
        while v.is_multiple_of(&BigInt::from(p)) {
            v /= p;
            k += 1;
        }
        k
    };
    let e = count(x.numer()) - count(x.denom());
    pow_rational(&int(p), -e)
}

/// Least number of planes through the origin covering the points, by iterative deepening over
/// the planes spanned by pairs of points.
fn minimal_plane_cover(points: &[Vec<Rational>]) -> usize {
    let k = points.len();
    let mut planes: BTreeSet<u32> = BTreeSet::new();
    for i in 0..k {
        for j in i + 1..k {
            let nrm = cross(&points[i], &points[j]);
            if nrm.iter().all(Zero::is_zero) {
                continue;
            }
            planes.insert((0..k).filter(|&t| dot(&nrm, &points[t]).is_zero()).fold(0u32, |m, t| m | 1 << t));
        }
    }
    let planes: Vec<u32> = planes.into_iter().collect();
    let all = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    fn search(planes: &[u32], all: u32, covered: u32, left: usize) -> bool {
        if covered == all {
            return true;
        }
        let rem = (all & !covered).count_ones() as usize;
        let best = planes.iter().map(|p| (p & !covered).count_ones() as usize).max().unwrap_or(0);
        if left == 0 || best * left < rem {
            return false;
        }
        let first = (all & !covered).trailing_zeros();
        planes.iter().filter(|p| *p >> first & 1 == 1).any(|p| search(planes, all, covered | p, left - 1))
    }
    (1..=k).find(|&d| search(&planes, all, 0, d)).unwrap()
}

fn cover_instance(rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    loop {
        let mut points: Vec<Vec<Rational>> = Vec::new();
        let planes = rng.gen_range(2..=5);
        for _ in 0..planes {
            let normal: Vec<Rational> = loop {
                let v: Vec<Rational> = (0..3).map(|_| int(rng.gen_range(-3..=3))).collect();
                if v.iter().any(|c| !c.is_zero()) {
                    break v;
                }
            };
            // two independent vectors orthogonal to the normal
            let mut basis = Vec::new();
            for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
                let w = cross(&normal, &e.map(int));
                if !w.iter().all(Zero::is_zero) && basis.iter().all(|b: &Vec<Rational>| !cross(b, &w).iter().all(Zero::is_zero)) {
                    basis.push(w);
                }
            }
            for _ in 0..rng.gen_range(3..=6) {
                let (a, b) = (int(rng.gen_range(-4..=4)), int(rng.gen_range(-4..=4)));
                let scale = Rational::new(BigInt::one(), BigInt::from(2i64.pow(rng.gen_range(0..=2)) * 3i64.pow(rng.gen_range(0..=2))));
                let p: Vec<Rational> = (0..3).map(|t| (&a * &basis[0][t] + &b * &basis[1][t]) * &scale).collect();
                if !p.iter().all(Zero::is_zero) && !points.contains(&p) {
                    points.push(p);
                }
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let p: Vec<Rational> = (0..3).map(|_| Rational::new(BigInt::from(rng.gen_range(-6..=6)), BigInt::from([1, 2, 3, 4, 6][rng.gen_range(0..5)]))).collect();
            if !p.iter().all(Zero::is_zero) && !points.contains(&p) {
                points.push(p);
            }
        }
        points.truncate(30);
        if points.len() >= 3 && Subspace::span(3, &points).is_full() {
            return points;
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for inst in 0..20 {
        let points = cover_instance(&mut rng);
        let k = points.len();
        let mut d: BTreeMap<Place, Rational> = BTreeMap::new();
        let mut d_inf = Rational::zero();
        let (mut d2, mut d3) = (Rational::one(), Rational::one());
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    let v = det3(&points[i], &points[j], &points[l]);
                    if v.is_zero() {
                        continue;
                    }
                    d_inf = d_inf.max(v.abs());
                    d2 = d2.max(p_abs(&v, 2));
                    d3 = d3.max(p_abs(&v, 3));
                }
            }
        }
        d.insert(Place::Infinity, d_inf);
        d.insert(Place::Prime(BigInt::from(2)), d2);
        d.insert(Place::Prime(BigInt::from(3)), d3);
        let total: Rational = d.values().product();
        let report = match subspace_cover(&points, &d) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("instance {inst}: {e}"));
                continue;
            }
        };
        let Some(pb) = &report.pullback else {
            failures.push(format!("instance {inst}: no pullback"));
            continue;
        };
        for (x, u) in points.iter().zip(&pb.coordinates) {
            let back: Vec<Rational> = (0..3).map(|t| u.iter().zip(&pb.basis).map(|(c, b)| Rational::from_integer(c.clone()) * &b[t]).sum()).collect();
            if &back != x {
                failures.push(format!("instance {inst}: coordinates do not reproduce {x:?}"));
            }
        }
        let covered = points.iter().all(|x| report.cover.iter().any(|s| s.contains(x))) && report.cover.iter().all(|s| !s.is_full());
        // (size / 100³)² <= D
        let size = report.cover.len();
        let within = pow_rational(&Rational::new(BigInt::from(size), BigInt::from(1_000_000)), 2) <= total;
        let minimum = minimal_plane_cover(&points);
        ratios.push(format!("{size}/{minimum}"));
        if !covered || !within || !report.within_bound || size > 2 * minimum {
            failures.push(format!("instance {inst}: {k} points, cover {size}, minimum {minimum}, covered {covered}, within {within}"));
        }
    }
    outcome(failures.is_empty(), format!("20 instances, greedy/minimum {} {}", ratios.join(" "), failures.join("; ")))
}

// ---- criterion 7 ----

fn random_between(rng: &mut ChaCha8Rng, lo: &BigInt, hi: &BigInt) -> BigInt {
    let width = hi - lo;
    if width.is_zero() {
        return lo.clone();
    }
    // log-uniform offsets reach every scale of the interval
    let bits = rng.gen_range(0..=width.bits());
    let bytes: Vec<u8> = (0..bits / 8 + 1).map(|_| rng.gen()).collect();
    let r = BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes) % (BigInt::one() << bits).max(BigInt::one());
    lo + r % (&width + 1)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut samples = 0;
    let mut counts = Vec::new();
    for n in [2u32, 3, 4] {
        for delta in [rat(1, 4), rat(1, 2), int(1)] {
            for h in [int(10), pow_rational(&int(10), 40), pow_rational(&int(10), 200)] {
                let c = covering_intervals(n, &delta, &h).unwrap();
                counts.push(format!("{}/{}", c.a, c.b));
                let threshold = c.i2_end.exact().unwrap().to_integer();
                let end = c.i1_end.exact().unwrap().to_integer();
                for w in c.i1_windows.windows(2).chain(c.i2_windows.windows(2)) {
                    if w[0].hi.cmp(&w[1].lo).unwrap() != std::cmp::Ordering::Equal {
                        failures.push(format!("n={n} δ={delta}: windows {} and {} do not telescope", w[0].h, w[1].h));
                    }
                }
                for k in 0..1000 {
                    let y = match k {
                        0 => threshold.clone(),
                        1 => end.clone(),
                        _ => random_between(&mut rng, &threshold, &end),
                    };
                    samples += 1;
                    if c.locate_i1(&Rational::from_integer(y.clone())).unwrap().is_none() {
                        failures.push(format!("n={n} δ={delta} H={h}: {y} not covered in I₁"));
                    }
                }
                for k in 0..1000 {
                    let y = match k {
                        0 => BigInt::one(),
                        1 => &threshold - 1,
                        _ => random_between(&mut rng, &BigInt::one(), &(&threshold - 1)),
                    };
                    samples += 1;
                    if c.locate_i2(&Rational::from_integer(y.clone())).unwrap().is_none() {
                        failures.push(format!("n={n} δ={delta}: {y} not covered in I₂"));
                    }
                }
                if !c.a_within_bound || !c.b_within_bound {
                    failures.push(format!("n={n} δ={delta} H={h}: A={} B={} exceed the bounds", c.a, c.b));
                }
            }
        }
    }
    failures.truncate(5);
    outcome(failures.is_empty(), format!("27 grid points, {samples} sampled heights, A/B {} {}", counts.join(" "), failures.join("; ")))
}

// ---- criterion 8 ----

fn log2_of(v: &BoundValue, bits: u32) -> RealEnclosure {
    v.log2(bits).unwrap()
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let s = schmidt89_bound(2, &int(1)).unwrap();
    let exact54 = s.value.log2log2(128).unwrap() == RealEnclosure::exact(int(54));
    pass &= exact54;
    notes.push(format!("schmidt89 log₂log₂ = {}", s.value.log2log2(128).unwrap().to_decimal(6)));
    for (n, delta, r, d) in [(2u32, int(1), int(3), int(1)), (2, rat(1, 2), int(2), int(1)), (3, int(1), int(3), int(2)), (4, rat(1, 2), int(4), int(3))] {
        let total = theorem21_window_total_for(n, &delta, &r, &d).unwrap();
        let bound = theorem21_bound(n, &delta, &r, &d, 256).unwrap();
        let lt = RealEnclosure::exact(Rational::from_integer(total)).ln(256).unwrap();
        let ln2 = subspace_lab::arith::enclosure::ln_rational(&int(2), 256);
        let lt = lt.div(&ln2).unwrap();
        let lb = log2_of(&bound.value, 256);
        match lt.certain_cmp(&lb) {
            Some(std::cmp::Ordering::Greater) => {
                pass = false;
                let ratio = lt.sub(&lb).midpoint().to_f64().unwrap().exp2();
                notes.push(format!("(n={n}, δ={delta}, R={r}, D={d}) composition exceeds bound by factor {ratio:.3}"));
            }
            Some(_) => notes.push(format!("(n={n}, δ={delta}, R={r}, D={d}) composition within bound")),
            None => {
                pass = false;
                notes.push(format!("(n={n}, δ={delta}) comparison undecided"));
            }
        }
    }
    let mut unstable = Vec::new();
    for (n, delta) in [(2u32, int(1)), (3, rat(1, 2)), (5, rat(1, 4))] {
        let a = comparison_table(n, &delta, &int(n as i64), &int(2), &int(100), 128).unwrap();
        let b = comparison_table(n, &delta, &int(n as i64), &int(2), &int(100), 512).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let agree = match (&x.value, &y.value) {
                (BoundValue::Exact(p), BoundValue::Exact(q)) => p == q,
                (BoundValue::Enclosure(p), BoundValue::Enclosure(q)) => q.is_within(p) || p.intersect(q).is_some(),
                (BoundValue::Log2 { log2: p, negative: s }, BoundValue::Log2 { log2: q, negative: t }) => s == t && p.intersect(q).is_some(),
                (BoundValue::Log2Log2(p), BoundValue::Log2Log2(q)) => p.intersect(q).is_some(),
                _ => false,
            };
            if !agree {
                unstable.push(format!("{} at n={n}", x.name));
            }
        }
    }
    pass &= unstable.is_empty();
    notes.push(format!("128/512-bit disagreements: {}", unstable.len()));
    outcome(pass, notes.join("; "))
}

// ---- criterion 9 ----

fn constructor_checks(x: &AlgebraicReal, delta: &Rational, alphas: &[Rational], u: std::ops::RangeInclusive<i64>) -> Result<usize, String> {
    let sys = cubic_system(x, delta).unwrap();
    let mut emitted = Vec::new();
    for a in alphas {
        let sols = cubic_solutions_from_u(x, delta, a, u.clone()).map_err(|e| format!("α={a}: {e}"))?;
        for s in sols {
            let g = s.x.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
            if !g.is_one() {
                return Err(format!("{:?} is not primitive", s.x));
            }
            // membership recomputed from the forms
            let theta = x.refine(2048);
            let r = |t: &Rational| Rational::from_integer(s.x[0].clone()) + Rational::from_integer(s.x[1].clone()) * t + Rational::from_integer(s.x[2].clone()) * t * t;
            let (v0, v1) = (r(&theta.0), r(&theta.1));
            let h = Rational::from_integer(s.x.iter().map(|c| c.abs()).max().unwrap());
            let (p, q) = (delta.numer().to_i64().unwrap(), delta.denom().to_i64().unwrap());
            // |L(x)|^q·H^(2q+p) <= 1 with |L(x)| bounded above by the enclosure
            let far = v0.abs().max(v1.abs());
            if pow_rational(&far, q) * pow_rational(&h, 2 * q + p) > Rational::one() {
                return Err(format!("{:?} fails the inequality", s.x));
            }
            emitted.push(s);
        }
    }
    if let Some(b) = emitted.iter().map(|s| s.height.clone()).max() {
        let all = enumerate_solutions(&sys, &b).map_err(|e| e.to_string())?;
        for s in &emitted {
            if !all.solutions.iter().any(|t| t.x == s.x) {
                return Err(format!("{:?} missing from the enumeration at B={b}", s.x));
            }
        }
    }
    Ok(emitted.len())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let x = xi("cbrt2");
    let mut alphas = Vec::new();
    while alphas.len() < 50 {
        let s = rng.gen_range(1..=50i64);
        // numerators near sξ give the closest approximations
        let r: BigInt = (x.refine(64).0 * int(s)).round().to_integer() + rng.gen_range(-2..=2i64);
        let a = Rational::new(r.clone(), BigInt::from(s));
        if r.gcd(&BigInt::from(s)).is_one() && !alphas.contains(&a) {
            alphas.push(a);
        }
    }
    let main = constructor_checks(&x, &rat(1, 2), &alphas, -50..=50);
    let tiny = constructor_checks(&xi("tiny"), &rat(1, 2), &[int(0)], -6..=6);
    match (main, tiny) {
        (Ok(m), Ok(t)) => outcome(
            true,
            format!("2^(1/3): 50 coprime α, u ∈ [-50, 50], {m} vectors emitted (vacuous); root of X³-1000X-1: {t} vectors, all primitive, solving and enumerated"),
        ),
        (m, t) => outcome(false, format!("2^(1/3) {:?}; X³-1000X-1 {:?}", m.err(), t.err())),
    }
}

// ---- criterion 10 ----

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    for _ in 0..10_000 {
        let num = loop {
            let v: i64 = rng.gen_range(-1_000_000_000_000..=1_000_000_000_000);
            if v != 0 {
                break v;
            }
        };
        let den: i64 = rng.gen_range(1..=1_000_000_000_000);
        if product_formula_check(&rat(num, den)).unwrap() != Rational::one() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("10000 rationals, {bad} products different from 1"))
}

fn main() {
    let start = Instant::now();
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed())
    };
    let t = Instant::now();
    let (c1, c2) = criteria_1_and_2();
    let roth_time = t.elapsed();
    let results = vec![
        (1, "Roth scan equals convergent oracle", (c1, roth_time)),
        (2, "gap principle audit", (c2, Duration::ZERO)),
        (3, "cubic filtration slopes", timed(&criterion_3)),
        (4, "window spans on data", timed(&criterion_4)),
        (5, "partition property suite", timed(&criterion_5)),
        (6, "subspace cover reduction", timed(&criterion_6)),
        (7, "covering intervals", timed(&criterion_7)),
        (8, "bound calculators", timed(&criterion_8)),
        (9, "cubic constructor", timed(&criterion_9)),
        (10, "product formula", timed(&criterion_10)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, (o, elapsed)) in &results {
        let known = KNOWN_RED.iter().find(|(k, _)| k == id);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name} [{elapsed:.1?}]: {}", o.detail.trim());
        match (o.pass, known) {
            (false, Some((_, why))) => println!("             known red: {why}"),
            (false, None) => unexpected.push(*id),
            (true, Some(_)) => println!("             listed as known red but passed"),
            (true, None) => {}
        }
    }
    println!("acceptance finished in {:.2?}", start.elapsed());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
