//! Suite orchestration for the batch front end: each command runs a family
//! of exact checks and produces a deterministic machine-readable report.

use std::path::PathBuf;

use permucat_core::combinat::{
    self, compare, enumerate_ghat, group_act, GhatObject, GroupElem, OrderKind,
};
use permucat_core::excoll;
use permucat_core::gitwin;
use permucat_core::picard::{self, ModelId};
use permucat_core::report::{Check, Report};
use permucat_core::toric::{self, class_to_tdivisor, Fan, Oracle, TDivisor};
use permucat_core::Result;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ghat,
    Picard,
    Toric,
    Excoll,
    Windows,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ghat => "ghat",
            Command::Picard => "picard",
            Command::Toric => "toric",
            Command::Excoll => "excoll",
            Command::Windows => "windows",
            Command::All => "all",
        }
    }
}

/// Suite configuration; hard ceilings per module are enforced on top.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: Option<u8>,
    pub n_max: Option<u8>,
    pub order: Option<OrderKind>,
    pub margin: i64,
    pub jobs: usize,
    pub out: PathBuf,
    pub cache: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: None,
            n_max: None,
            order: None,
            margin: 1,
            jobs: 0,
            out: PathBuf::from("permucat-report.json"),
            cache: None,
        }
    }
}

impl SuiteConfig {
    fn describe(&self) -> String {
        // the worker count is deliberately absent: it may not affect reports
        format!(
            "n={:?} n_max={:?} order={:?} margin={}",
            self.n, self.n_max, self.order, self.margin
        )
    }
}

/// Runs one command and returns the finalized report.
pub fn run(command: Command, config: &SuiteConfig) -> Result<Report> {
    if let Some(dir) = &config.cache {
        // warm the on-disk fans so every command shares the same files
        for n in 2..=6u8 {
            toric::lm_fan_cached(n, Some(dir))?;
        }
    }
    let mut report = Report::new(command.name(), config.describe());
    let body = |report: &mut Report| -> Result<()> {
        match command {
            Command::Ghat => report.extend(ghat_suite(config)?),
            Command::Picard => report.extend(picard_suite(config)?),
            Command::Toric => report.extend(toric_suite(config)?),
            Command::Excoll => report.extend(excoll_suite(config)?),
            Command::Windows => report.extend(windows_suite(config)?),
            Command::All => {
                report.extend(ghat_suite(config)?);
                report.extend(picard_suite(config)?);
                report.extend(toric_suite(config)?);
                report.extend(excoll_suite(config)?);
                report.extend(windows_suite(config)?);
            }
        }
        Ok(())
    };
    if config.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| permucat_core::Error::invalid(e.to_string()))?;
        pool.install(|| body(&mut report))?;
    } else {
        body(&mut report)?;
    }
    report.finalize();
    Ok(report)
}

// ---------------------------------------------------------------------------
// ghat
// ---------------------------------------------------------------------------

pub fn ghat_suite(config: &SuiteConfig) -> Result<Vec<Check>> {
    let n_max = config.n_max.unwrap_or(12).min(20) as u32;
    // enumeration is factorial: nine levels by default, ten on request
    let enum_cap = n_max.min(if config.n_max.is_some() { 10 } else { 9 });
    let mut checks = Vec::new();

    for line in combinat::derangement_suite(n_max, enum_cap)? {
        let id = format!("ghat/derangement/{:02}", line.n);
        let ok = line.composition_sum_ok && line.recursion_ok && line.count_ok.unwrap_or(true);
        checks.push(Check::of(
            id,
            format!("count, composition identity and recursion agree at n={}", line.n),
            ok,
            format!("enumerated={:?} expected={}", line.enumerated, line.subfactorial),
        ));
    }

    // group action, orders, end data and serialization on small ground sets
    for n in 2..=5u8 {
        let objs = enumerate_ghat(n)?;
        let crem = GroupElem::cremona(n);
        let mut ok = true;
        for o in &objs {
            ok &= group_act(&crem, &group_act(&crem, o)) == *o;
            let text = o.to_text();
            ok &= GhatObject::from_text(o.ground(), &text)? == *o;
        }
        // both orders total modulo identity, and the swap conjugates them
        for a in &objs {
            for b in &objs {
                let lex = compare(a, b, OrderKind::Lex)?;
                let conj = compare(&group_act(&crem, a), &group_act(&crem, b), OrderKind::LexPrime)?;
                ok &= lex == conj;
            }
        }
        checks.push(Check::of(
            format!("ghat/structure/{n}"),
            "swap involution, serialization round trip and order conjugation",
            ok,
            "structure check failed",
        ));
    }

    // end-data decision on the documented pair
    let g8 = combinat::GroundSet::new(8)?;
    let t2 = GhatObject::from_text(g8, "1,2,3|4,5|6,7,8;2,1,1")?;
    let t = GhatObject::from_text(g8, "1,2,3|4,5,6,7,8;1,3")?;
    let fwd = combinat::end_data_decide(&t2, &t)?;
    let bwd = combinat::end_data_decide(&t, &t2)?;
    checks.push(Check::of(
        "ghat/end-data/documented-pair",
        "the end-data test fires one way and stays silent the other",
        fwd == combinat::EndDecision::Vanish
            && matches!(bwd, combinat::EndDecision::Inconclusive { .. }),
        format!("forward={fwd:?}"),
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// picard
// ---------------------------------------------------------------------------

pub fn picard_suite(config: &SuiteConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cap = config.n_max.unwrap_or(12).clamp(2, 12);

    for n in 2..=cap {
        let rep = picard::class_identities_check(n)?;
        checks.push(Check::of(
            format!("picard/cartan/{:02}", n),
            "the nef basis change is symmetric with Cartan inverse",
            rep.b_symmetric && rep.g_match && rep.inverse_is_cartan && rep.product_is_identity,
            "matrix identity failed",
        ));
    }

    for n in 3..=6u8 {
        checks.push(Check::of(
            format!("picard/comps/{n}"),
            "partial boundary sums restrict to the far-pole cotangent class",
            picard::comps_check(n)?,
            "restriction identity failed",
        ));
    }

    // generator classes: integrality and swap symmetry
    for n in 2..=6u8 {
        let model = ModelId::lm_n(n)?;
        let mut ok = true;
        for a in 1..n {
            let g = picard::g_class(model, a)?;
            ok &= g.is_integral();
            ok &= picard::cremona_class(&g)? == picard::g_class(model, n - a)?;
        }
        checks.push(Check::of(
            format!("picard/generators/{n}"),
            "generator classes are integral and swap-symmetric",
            ok,
            "generator class failed",
        ));
    }

    // reduction decomposition, exhaustively over forgotten sets and labels
    for n in 2..=6u8 {
        let model = ModelId::lm_n(n)?;
        let mut ok = true;
        let mut witness = String::new();
        let mut i_set = model.ground();
        loop {
            let keep = combinat::mask_len(model.ground() & !i_set);
            for a in 1..keep {
                let s = picard::sigma_decomposition(model, i_set, a)?;
                if !s.identity_ok
                    || !s.sigma1_bound_failures.is_empty()
                    || !s.sigma2_bound_failures.is_empty()
                {
                    ok = false;
                    if witness.is_empty() {
                        witness = format!("I={i_set:b} a={a}");
                    }
                }
            }
            if i_set == 0 {
                break;
            }
            i_set = (i_set - 1) & model.ground();
        }
        checks.push(Check::of(
            format!("picard/reduction/{n}"),
            "the pullback decomposition identity and coefficient bounds hold",
            ok,
            witness,
        ));
    }

    // blow-down compatibility up to one extra level
    for n in 2..=5u8 {
        let mut ok = true;
        for r in -1..=1i8 {
            let model = ModelId::new(ModelId::lm_n(n)?.ground(), r)?;
            for i in 1..=n {
                for a in 1..=((n as i32 + r as i32) as u8) {
                    let rep = picard::blowdown_compat(model, a, i)?;
                    ok &= rep.identity_ok && rep.bound_failures.is_empty();
                }
            }
        }
        checks.push(Check::of(
            format!("picard/blowdown/{n}"),
            "generator classes are compatible with every single blow-down",
            ok,
            "blow-down identity failed",
        ));
    }

    // forgetful pullbacks compose
    for n in 4..=6u8 {
        let model = ModelId::lm_n(n)?;
        let mut ok = true;
        let full = model.ground();
        let mut i_set = full;
        loop {
            let keep_mask = full & !i_set;
            let keep = combinat::mask_len(keep_mask);
            if keep >= 2 && i_set != 0 {
                let first_bit: u16 = 1 << (i_set.trailing_zeros() as u16);
                let rest = i_set & !first_bit;
                for a in 1..keep {
                    let direct = picard::pullback_forgetful(model, i_set, a)?;
                    let inner = if rest == 0 {
                        picard::g_class(ModelId::lm(keep_mask)?, a)?
                    } else {
                        picard::pullback_forgetful(ModelId::lm(full & !first_bit)?, rest, a)?
                    };
                    let staged = picard::pullback_class(model, first_bit, &inner)?;
                    ok &= staged == direct;
                }
            }
            if i_set == 0 {
                break;
            }
            i_set = (i_set - 1) & full;
        }
        checks.push(Check::of(
            format!("picard/pullback-tower/{n}"),
            "forgetful pullbacks compose",
            ok,
            "composition failed",
        ));
    }

    // lifts restrict correctly, both constructions
    for n in 4..=5u8 {
        let model = ModelId::lm_n(n)?;
        let mut ok = true;
        for obj in enumerate_ghat(n)? {
            if !obj.is_torsion() {
                continue;
            }
            let lift = picard::lift_bundle(model, obj.blocks(), obj.labels())?;
            ok &= picard::lift_restricts_correctly(model, obj.blocks(), obj.labels(), &lift)?;
            let alt = picard::lift_bundle_alt(model, obj.blocks(), obj.labels())?;
            ok &= picard::lift_restricts_correctly(model, obj.blocks(), obj.labels(), &alt)?;
        }
        checks.push(Check::of(
            format!("picard/lift/{n}"),
            "both lift constructions restrict to the boxed labels",
            ok,
            "lift restriction failed",
        ));
    }

    // rule-based restriction against the star fans
    for n in 3..=5u8 {
        checks.push(Check::of(
            format!("picard/star-restriction/{n}"),
            "rule-based restriction agrees with the star fans on all two-block strata",
            excoll::restriction_vs_star_check(n)?,
            "star restriction disagreed",
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// toric
// ---------------------------------------------------------------------------

fn table_pair_checks(oracle: &Oracle, d: &TDivisor, margin: i64) -> Result<(bool, bool)> {
    let dim = oracle.fan().dim();
    let k = TDivisor::canonical(oracle.fan());
    let t = oracle.cohomology(d, margin)?;
    let td = oracle.cohomology(&k.sub(d), margin)?;
    let serre_ok = (0..=dim).all(|p| t.h[p] == td.h[dim - p]);
    let euler_ok = t.euler() == oracle.chi(d, margin)?;
    let mut nef_ok = true;
    if toric::nef_check(oracle.fan(), d)?.nef {
        nef_ok = t.h[1..].iter().all(|&x| x == 0)
            && t.h[0] == toric::polytope_point_count(oracle.fan(), d);
    }
    Ok((serre_ok && euler_ok, nef_ok))
}

fn box_divisors(nvars: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(nvars as u32);
    for code in 0..total {
        let mut c = code;
        let mut v = Vec::with_capacity(nvars);
        for _ in 0..nvars {
            v.push((c % width) as i64 - bound);
            c /= width;
        }
        out.push(v);
    }
    out
}

pub fn toric_suite(config: &SuiteConfig) -> Result<Vec<Check>> {
    use rayon::prelude::*;
    let margin = config.margin;
    let mut checks = Vec::new();

    // fan shape and the on-disk format
    for n in 2..=6u8 {
        let fan = toric::lm_fan_cached(n, config.cache.as_deref())?;
        let ok = fan.rays().len() == (1usize << n) - 2
            && fan.max_cones().len() == (1..=n as usize).product::<usize>()
            && fan.is_smooth()
            && fan.is_complete();
        checks.push(Check::of(
            format!("toric/fan/{n}"),
            "the moduli fan has subset rays, flag cones, and is smooth and complete",
            ok,
            format!("rays={} cones={}", fan.rays().len(), fan.max_cones().len()),
        ));
    }

    // small fans: exhaustive coefficient boxes on the rays
    for (name, fan) in [
        ("p1", Fan::projective(1)),
        ("p2", Fan::projective(2)),
        ("p1xp1", Fan::product(&Fan::projective(1), &Fan::projective(1))),
    ] {
        let oracle = Oracle::new(fan)?;
        let divisors = box_divisors(oracle.fan().rays().len(), 3);
        let results: Vec<Result<(bool, bool)>> = divisors
            .par_iter()
            .map(|coeffs| table_pair_checks(&oracle, &TDivisor { coeffs: coeffs.clone() }, margin))
            .collect();
        let mut ok = true;
        for r in results {
            let (s, nf) = r?;
            ok &= s && nf;
        }
        checks.push(Check::of(
            format!("toric/oracle-box/{name}"),
            "duality, Euler consistency and nef section counts over the coefficient box",
            ok,
            "oracle self-test failed",
        ));
    }

    // moduli fans: exhaustive over the hyperplane class and the boundary symmetrizations
    for n in 3..=5u8 {
        let oracle = excoll::lm_oracle(n)?;
        let model = ModelId::lm_n(n)?;
        let nvars = (n - 1) as usize;
        let divisors = box_divisors(nvars, 3);
        let results: Vec<Result<(bool, bool)>> = divisors
            .par_iter()
            .map(|coeffs| {
                let mut class = picard::DivisorClass::zero(model);
                class.add_h(num_rational::BigRational::from(num_bigint::BigInt::from(coeffs[0])));
                for (level, &c) in coeffs[1..].iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut sub = model.ground();
                    while sub > 0 {
                        if combinat::mask_len(sub) as usize == level + 1 {
                            class.add_e(
                                sub,
                                num_rational::BigRational::from(num_bigint::BigInt::from(c)),
                            )?;
                        }
                        sub = (sub - 1) & model.ground();
                    }
                }
                let d = class_to_tdivisor(&class, oracle.fan())?;
                table_pair_checks(&oracle, &d, margin)
            })
            .collect();
        let mut ok = true;
        for r in results {
            let (s, nf) = r?;
            ok &= s && nf;
        }
        checks.push(Check::of(
            format!("toric/oracle-box/lm{n}"),
            "duality, Euler consistency and nef section counts over the symmetric box",
            ok,
            "oracle self-test failed",
        ));
    }

    // sampled divisors on the largest fan
    {
        let oracle = excoll::lm_oracle(6)?;
        let model = ModelId::lm_n(6)?;
        let admissible = model.admissible_sets();
        let mut rng = StdRng::seed_from_u64(0x5eed_0006);
        let mut samples: Vec<picard::DivisorClass> = Vec::new();
        for round in 0..200 {
            let bound: i64 = if round < 150 { 1 } else { 2 };
            let mut class = picard::DivisorClass::zero(model);
            class.add_h(num_rational::BigRational::from(num_bigint::BigInt::from(
                rng.random_range(-bound..=bound),
            )));
            for _ in 0..4 {
                let j = admissible[rng.random_range(0..admissible.len())];
                let c: i64 = rng.random_range(-bound..=bound);
                if c != 0 {
                    class.add_e(j, num_rational::BigRational::from(num_bigint::BigInt::from(c)))?;
                }
            }
            samples.push(class);
        }
        let results: Vec<Result<(bool, bool)>> = samples
            .par_iter()
            .map(|class| {
                let d = class_to_tdivisor(class, oracle.fan())?;
                table_pair_checks(&oracle, &d, margin)
            })
            .collect();
        let mut ok = true;
        for r in results {
            let (s, nf) = r?;
            ok &= s && nf;
        }
        checks.push(Check::of(
            "toric/oracle-sample/lm6",
            "duality, Euler consistency and nef section counts over sampled divisors",
            ok,
            "oracle self-test failed",
        ));
    }

    // shift invariance: principal shifts never change the table
    for (name, fan) in [
        ("p1", Fan::projective(1)),
        ("p2", Fan::projective(2)),
        ("p1xp1", Fan::product(&Fan::projective(1), &Fan::projective(1))),
    ] {
        let oracle = Oracle::new(fan)?;
        let dim = oracle.fan().dim();
        let mut base = TDivisor::zero(oracle.fan());
        base.coeffs[0] = 2;
        let t0 = oracle.cohomology(&base, margin)?;
        let mut rng = StdRng::seed_from_u64(0x5eed_2000 + dim as u64);
        let mut ok = true;
        for _ in 0..50 {
            let m: Vec<i64> = (0..dim).map(|_| rng.random_range(-2..=2)).collect();
            let shifted = base.add(&TDivisor::principal(oracle.fan(), &m));
            ok &= oracle.cohomology(&shifted, margin)? == t0;
        }
        checks.push(Check::of(
            format!("toric/shift-invariance/{name}"),
            "fifty principal shifts leave the table unchanged",
            ok,
            "shift changed the table",
        ));
    }
    for n in 3..=6u8 {
        let oracle = excoll::lm_oracle(n)?;
        let model = ModelId::lm_n(n)?;
        let base = class_to_tdivisor(&picard::g_pos(model, 2)?.neg(), oracle.fan())?;
        let t0 = oracle.cohomology(&base, margin)?;
        let dim = oracle.fan().dim();
        let mut rng = StdRng::seed_from_u64(0x5eed_1000 + n as u64);
        let shifts: Vec<Vec<i64>> = (0..50)
            .map(|_| (0..dim).map(|_| rng.random_range(-1..=1)).collect())
            .collect();
        let results: Vec<Result<bool>> = shifts
            .par_iter()
            .map(|m| {
                let shifted = base.add(&TDivisor::principal(oracle.fan(), m));
                Ok(oracle.cohomology(&shifted, margin)? == t0)
            })
            .collect();
        let mut ok = true;
        for r in results {
            ok &= r?;
        }
        checks.push(Check::of(
            format!("toric/shift-invariance/{n}"),
            "fifty principal shifts leave the table unchanged",
            ok,
            "shift changed the table",
        ));
    }

    // margin robustness
    for n in 3..=5u8 {
        let oracle = excoll::lm_oracle(n)?;
        let nrays = oracle.fan().rays().len();
        let mut ok = true;
        for seed in 0..5u64 {
            let coeffs: Vec<i64> =
                (0..nrays).map(|i| ((seed * 31 + i as u64 * 17) % 7) as i64 - 3).collect();
            let d = TDivisor { coeffs };
            ok &= oracle.cohomology(&d, 0)? == oracle.cohomology(&d, 2)?;
        }
        checks.push(Check::of(
            format!("toric/margin/{n}"),
            "margin zero and margin two give identical tables",
            ok,
            "margin sensitivity detected",
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// excoll
// ---------------------------------------------------------------------------

pub fn excoll_suite(config: &SuiteConfig) -> Result<Vec<Check>> {
    let n_hi = config.n.unwrap_or(5).clamp(2, 6);
    let margin = config.margin;
    let orders: Vec<OrderKind> = match config.order {
        Some(o) => vec![o],
        None => vec![OrderKind::Lex, OrderKind::LexPrime],
    };
    let mut checks = Vec::new();

    for n in 2..=n_hi {
        let report = excoll::verify_collection(n, &orders, margin)?;
        checks.push(Check::of(
            format!("excoll/collection/{n}"),
            format!(
                "{} objects: self-Ext, {} ordered pairs and the line-after-torsion rule",
                report.objects, report.pairs_checked
            ),
            report.all_ok(),
            report.failures.join("; "),
        ));
    }

    for n in 2..=n_hi.min(5) {
        let gram = excoll::euler_pairing_matrix(n, margin)?;
        checks.push(Check::of(
            format!("excoll/gram/{n}"),
            "the pairing matrix is unitriangular in the first order",
            gram.is_unitriangular(),
            "pairing matrix not unitriangular",
        ));
    }

    for n in 4..=n_hi.min(5) {
        checks.push(Check::of(
            format!("excoll/lift-acyclic/{n}"),
            "lifts and their cut twists are acyclic",
            excoll::lift_acyclicity_check(n, margin)?,
            "a lift twist failed",
        ));
        checks.push(Check::of(
            format!("excoll/lift-independent/{n}"),
            "pairing rows do not depend on the chosen lift",
            excoll::lift_independence_spot_check(n, 10, margin)?,
            "lift dependence detected",
        ));
    }

    for n in 3..=n_hi.min(4) {
        checks.push(Check::of(
            format!("excoll/swap-equivariance/{n}"),
            "certification commutes with the pole swap",
            excoll::cremona_equivariance_check(n, margin)?,
            "equivariance failed",
        ));
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// windows
// ---------------------------------------------------------------------------

pub fn windows_suite(config: &SuiteConfig) -> Result<Vec<Check>> {
    let n_hi = config.n.unwrap_or(9).clamp(3, 9);
    let mut checks = Vec::new();

    for n in 3..=n_hi {
        checks.extend(gitwin::collection_suite(n)?);
    }
    for n in [3u8, 5, 7] {
        if n <= n_hi {
            checks.push(gitwin::odd_orthogonality_suite(n)?);
        }
    }
    for n in [3u8, 5, 7, 9] {
        if n <= n_hi {
            let rep = gitwin::closure_fullness_odd(n)?;
            checks.push(Check::of(
                format!("windows/closure-odd/{n}"),
                "the window types generate every pushforward type",
                rep.ok,
                format!("{:?}", rep.unreached),
            ));
        }
    }
    for n in [4u8, 6] {
        if n <= n_hi {
            let rep = gitwin::closure_fullness_even(n)?;
            checks.push(Check::of(
                format!("windows/closure-even/{n}"),
                "region containments, line preconditions and template propagation",
                rep.ok,
                rep.notes.join("; "),
            ));
        }
    }
    for n in 3..=n_hi.min(6) {
        checks.extend(gitwin::dictionary_check(n)?);
    }
    for n in [4u8, 6] {
        if n <= n_hi {
            checks.extend(gitwin::alpha_x_suite(n, true)?);
        }
    }
    if n_hi >= 8 {
        checks.extend(gitwin::alpha_x_suite(8, false)?);
    }

    // torsion pair criterion against the dimension count
    for r in 2..=4i64 {
        let mut ok = true;
        for a in 0..r {
            for b in 0..r {
                for a2 in 0..r {
                    for b2 in 0..r {
                        let (_, agree) = gitwin::torsion_pair_check(r, (a, b), (a2, b2))?;
                        ok &= agree;
                    }
                }
            }
        }
        checks.push(Check::of(
            format!("windows/torsion-pairs/{r}"),
            "the four-case criterion agrees with the dimension count on all pairs",
            ok,
            "criterion disagreed",
        ));
    }
    Ok(checks)
}

/// Per-pair certificates and the pairing matrix for one ground-set size, in
/// their on-disk formats.
pub fn excoll_artifacts(n: u8, margin: i64) -> Result<(String, String)> {
    let gram = excoll::euler_pairing_matrix(n, margin)?;
    let objs = enumerate_ghat(n)?;
    let mut certs = Vec::new();
    for order in [OrderKind::Lex, OrderKind::LexPrime] {
        for a in &objs {
            for b in &objs {
                if a != b && compare(a, b, order)? == std::cmp::Ordering::Greater {
                    certs.push(excoll::pair_vanishing_certificate(a, b, order, margin)?);
                }
            }
        }
    }
    let pairs = serde_json::to_string_pretty(&certs)
        .map_err(|e| permucat_core::Error::invalid(e.to_string()))?;
    Ok((gram.to_csv(), pairs + "\n"))
}
