//! Named invariant suites over one arc diagram, shared by the command line
//! `check` and the acceptance run.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ainf::{bounded_homotopy_search, check_structure, is_homomorphism, morphism_diff, morphism_space, Module, Morphism, Table};
use crate::arc_diagram::{ArcDiagram, PairSet};
use crate::error::{Error, Result};
use crate::join::{nabla_is_cycle, Joiner};
use crate::models::{alg_as_aa, alg_one_sided, da_identity, dd_identity, dual_alg_as_aa, elementary_a, elementary_d, Hand};
use crate::nice::{build_cap_diagram, build_twisting_slice_diagram, compare_with_algebra, count_domains, Verdict};
use crate::sfh;
use crate::strands::{check_dga, check_transport, AlgebraModel};
use crate::tensor::{box_product, external_tensor};

pub const SUITES: &[&str] = &["dga", "symmetry", "models", "join", "properties", "nice", "sfh", "homotopy"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub max_homotopy_len: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 0, max_homotopy_len: 4 }
    }
}

struct Log {
    suite: &'static str,
    out: Vec<Outcome>,
}

impl Log {
    fn new(suite: &'static str) -> Log {
        Log { suite, out: vec![] }
    }

    fn record(&mut self, name: impl Into<String>, r: Result<(bool, String)>) {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        self.out.push(Outcome { suite: self.suite, name: name.into(), passed, detail });
    }

    /// Counts passing cases; the detail names the first failure.
    fn tally(&mut self, name: impl Into<String>, cases: impl IntoIterator<Item = (String, Result<bool>)>) {
        let (mut n, mut ok, mut first) = (0, 0, None);
        for (label, r) in cases {
            n += 1;
            match r {
                Ok(true) => ok += 1,
                Ok(false) => first = first.or(Some(label)),
                Err(e) => first = first.or(Some(format!("{label}: {e}"))),
            }
        }
        let detail = match first {
            None => format!("{ok}/{n}"),
            Some(f) => format!("{ok}/{n}, first failure {f}"),
        };
        self.record(name, Ok((ok == n, detail)));
    }
}

/// The modules joins are tested over: right type-D `U`, left type-A `M`
/// and left type-D `V`, two of each per subset.
pub struct JoinFamily {
    pub us: Vec<Module>,
    pub ms: Vec<Module>,
    pub vs: Vec<Module>,
}

pub fn join_family(j: &Joiner) -> Result<JoinFamily> {
    let am = &j.am;
    let mut f = JoinFamily { us: vec![], ms: vec![], vs: vec![] };
    for s in PairSet::all(am.rank()) {
        f.us.push(elementary_d(am, s, Hand::Right));
        f.us.push(box_product(&alg_one_sided(am, s, Hand::Right), &j.dd)?);
        f.vs.push(elementary_d(am, s, Hand::Left));
        f.vs.push(box_product(&j.dd, &alg_one_sided(am, s, Hand::Left))?);
        f.ms.push(elementary_a(am, s, Hand::Left));
        f.ms.push(alg_one_sided(am, s, Hand::Left));
    }
    Ok(f)
}

/// Every standard model over `am`.
pub fn standard_models(am: &Arc<AlgebraModel>) -> Result<Vec<Module>> {
    let mut ms = vec![alg_as_aa(am), dual_alg_as_aa(am), da_identity(am), dd_identity(am)?];
    for s in PairSet::all(am.rank()) {
        for h in [Hand::Left, Hand::Right] {
            ms.push(elementary_a(am, s, h));
            ms.push(elementary_d(am, s, h));
            ms.push(alg_one_sided(am, s, h));
        }
    }
    Ok(ms)
}

pub fn run_suite(name: &str, z: &ArcDiagram, settings: &Settings) -> Result<Vec<Outcome>> {
    let am = Arc::new(AlgebraModel::new(z)?);
    let suite = SUITES
        .iter()
        .copied()
        .find(|s| *s == name)
        .ok_or_else(|| Error::Incompatible(format!("unknown suite `{name}`; expected one of {} or all", SUITES.join(", "))))?;
    let mut log = Log::new(suite);
    match suite {
        "dga" => dga(&mut log, z, &am),
        "symmetry" => symmetry(&mut log, &am),
        "models" => models(&mut log, &am)?,
        "join" => join(&mut log, &am)?,
        "properties" => properties(&mut log, &am)?,
        "nice" => nice(&mut log, z, &am),
        "sfh" => sfh_suite(&mut log, &am)?,
        "homotopy" => {
            let r = plant_and_recover(&am, settings.seed, 20, settings.max_homotopy_len);
            log.tally("planted boundaries recovered", r.into_iter().map(|(l, ok)| (l, Ok(ok))));
        }
        _ => unreachable!(),
    }
    Ok(log.out)
}

pub fn run_all(z: &ArcDiagram, settings: &Settings) -> Result<Vec<Outcome>> {
    let mut out = vec![];
    for s in SUITES {
        out.extend(run_suite(s, z, settings)?);
    }
    Ok(out)
}

fn dga(log: &mut Log, z: &ArcDiagram, am: &AlgebraModel) {
    log.record("alpha algebra", check_dga(am).map(|_| (true, format!("dim {}", am.dim()))));
    let flipped = AlgebraModel::new(&z.flip_type()).and_then(|b| check_dga(&b).map(|_| (true, format!("dim {}", b.dim()))));
    log.record("beta algebra", flipped);
}

fn symmetry(log: &mut Log, am: &AlgebraModel) {
    log.record("rotate180 is an anti-isomorphism", am.rotate180().and_then(|(b, r)| check_transport(am, &b, &r, true)).map(|_| (true, String::new())));
    log.record("reflect is an anti-isomorphism", am.reflect().and_then(|(b, r)| check_transport(am, &b, &r, true)).map(|_| (true, String::new())));
    let both = am.reflect().and_then(|(refl, f)| {
        let (back, g) = refl.rotate180()?;
        let composite: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        check_transport(am, &back, &composite, false).map(|_| (true, String::new()))
    });
    log.record("their composite is an isomorphism", both);
}

fn models(log: &mut Log, am: &Arc<AlgebraModel>) -> Result<()> {
    let ms = standard_models(am)?;
    log.tally("structure equations", ms.iter().map(|m| (m.name.clone(), Ok(check_structure(m).is_none()))));
    Ok(())
}

fn join(log: &mut Log, am: &Arc<AlgebraModel>) -> Result<()> {
    let j = Joiner::new(am.clone())?;
    let f = join_family(&j)?;
    log.tally("nabla is a cycle", f.ms.iter().map(|m| (m.name.clone(), nabla_is_cycle(&j, m))));
    log.tally(
        "diagonal is a cycle",
        f.ms.iter().map(|m| {
            let r = j.double_module(m).and_then(|dbl| {
                let delta = j.diagonal(m, &dbl);
                Ok(!delta.is_empty() && dbl.complex()?.differential().apply(&delta).is_empty())
            });
            (m.name.clone(), r)
        }),
    );
    log.record("cancellation is a cycle", j.cancel_ca().map(|ca| (is_homomorphism(&ca), String::new())));
    Ok(())
}

fn properties(log: &mut Log, am: &Arc<AlgebraModel>) -> Result<()> {
    let j = Joiner::new(am.clone())?;
    let f = join_family(&j)?;
    let (rot, map) = am.rotate180()?;
    let jr = Joiner::new(Arc::new(rot))?;
    let map = Arc::new(map);
    let k = am.rank();
    let mut identity = vec![];
    let mut sym = vec![];
    for m in &f.ms {
        for s in PairSet::all(k) {
            for u in [elementary_a(am, s, Hand::Right), alg_one_sided(am, s, Hand::Right)] {
                identity.push((format!("{} {}", u.name, m.name), j.join_identity_check(&u, m).map(|v| v.is_identity)));
            }
        }
        for u in &f.us {
            for v in &f.vs {
                sym.push((format!("{} {} {}", u.name, m.name, v.name), j.symmetry(&jr, &map, u, m, v)));
            }
        }
    }
    log.tally("identity", identity);
    log.tally("symmetry", sym);
    // Every combination up to rank 1; beyond that a fixed slice of it.
    let mut xs = vec![j.dd.as_ref().clone()];
    let mut assoc = vec![];
    if k <= 1 {
        for s in PairSet::all(k) {
            for t in PairSet::all(k) {
                xs.push(external_tensor(&elementary_d(am, s, Hand::Left), &elementary_d(am, t, Hand::Right))?);
            }
        }
        for u in &f.us {
            for m in &f.ms {
                for x in &xs {
                    for n in &f.ms {
                        for v in &f.vs {
                            let label = format!("{} {} {} {} {}", u.name, m.name, x.name, n.name, v.name);
                            assoc.push((label, j.associativity(u, m, x, n, v).map(|r| r.holds())));
                        }
                    }
                }
            }
        }
    } else {
        for u in f.us.iter().step_by(2) {
            for m in &f.ms {
                for n in f.ms.iter().step_by(2) {
                    let v = &f.vs[1];
                    let label = format!("{} {} {} {}", u.name, m.name, n.name, v.name);
                    assoc.push((label, j.associativity(u, m, &j.dd, n, v).map(|r| r.holds())));
                }
            }
        }
    }
    log.tally("associativity", assoc);
    Ok(())
}

fn nice(log: &mut Log, z: &ArcDiagram, am: &Arc<AlgebraModel>) {
    let slice = build_twisting_slice_diagram(z).and_then(|d| {
        let m = count_domains(&d, am)?;
        let v = compare_with_algebra(&d, &m, &alg_as_aa(am));
        Ok(match v {
            Verdict::Isomorphic { .. } => (true, format!("{} generators", m.dim())),
            Verdict::Mismatch(why) => (false, why),
        })
    });
    log.record("twisting slice", slice);
    log.tally(
        "caps",
        PairSet::all(am.rank()).map(|s| {
            let r = build_cap_diagram(z, s).and_then(|d| {
                let m = count_domains(&d, am)?;
                Ok(compare_with_algebra(&d, &m, &elementary_a(am, s, Hand::Left)).is_isomorphic())
            });
            (format!("cap {s}"), r)
        }),
    );
}

fn sfh_suite(log: &mut Log, am: &Arc<AlgebraModel>) -> Result<()> {
    let total = sfh::homology_blocks(am).and_then(|b| {
        let h = crate::gf2::homology(&sfh::algebra_complex(am)?).dimension;
        let sum: usize = b.values().sum();
        Ok((sum == h, format!("{sum} = {h}")))
    });
    log.record("block dimensions add up", total);
    log.record("associative", sfh::mu_h_associative(am).map(|b| (b, String::new())));
    log.record("unital", sfh::mu_h_unital(am).map(|b| (b, String::new())));
    let j = Joiner::new(am.clone())?;
    let sets: Vec<PairSet> = PairSet::all(am.rank()).collect();
    let mut mu = vec![];
    for &a in &sets {
        for &b in &sets {
            for &c in &sets {
                mu.push((format!("{a} {b} {c}"), sfh::mu_h_via_join(&j, a, b, c).map(|g| g.homology_equal())));
            }
        }
    }
    log.tally("multiplication through the gluing", mu);
    let mut mh = vec![];
    for s in &sets {
        for u in [alg_one_sided(am, *s, Hand::Right), elementary_a(am, *s, Hand::Right)] {
            for &a in &sets {
                for &b in &sets {
                    mh.push((format!("{} {a} {b}", u.name), sfh::m_h_via_join(&j, &u, a, b).map(|g| g.homology_equal())));
                }
            }
        }
    }
    log.tally("action through the gluing", mh);
    Ok(())
}

/// Plants `∂H₀` for seeded `H₀` with at most three inputs between modules
/// over `am` and asks the bounded search for some `H` with the same
/// boundary. Returns one verdict per trial.
pub fn plant_and_recover(am: &Arc<AlgebraModel>, seed: u64, trials: usize, max_len: usize) -> Vec<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<Arc<Module>> = vec![Arc::new(alg_as_aa(am))];
    for s in PairSet::all(am.rank()) {
        pool.push(Arc::new(alg_one_sided(am, s, Hand::Left)));
        pool.push(Arc::new(elementary_a(am, s, Hand::Left)));
    }
    let pairs: Vec<(Arc<Module>, Arc<Module>)> = pool
        .iter()
        .flat_map(|x| pool.iter().map(move |y| (x.clone(), y.clone())))
        .filter(|(x, y)| x.left.same_as(&y.left) && x.right.same_as(&y.right))
        .filter(|(x, y)| !morphism_space(x, y, 3).is_empty())
        .collect();
    let mut out = vec![];
    for t in 0..trials {
        let (src, dst) = pairs.choose(&mut rng).expect("the regular bimodule maps to itself").clone();
        let space = morphism_space(&src, &dst, 3);
        let mut table = Table::new();
        for (k, term) in &space {
            if rng.gen_bool(0.3) {
                table.toggle(k.clone(), *term);
            }
        }
        let h0 = Morphism { src: src.clone(), dst: dst.clone(), table };
        let f = morphism_diff(&h0);
        let zero = Morphism::zero(src.clone(), dst.clone());
        let ok = bounded_homotopy_search(&f, &zero, max_len).is_some_and(|h| morphism_diff(&h).table == f.table);
        out.push((format!("trial {t}: {} -> {}, {} entries", src.name, dst.name, h0.table.len()), ok));
    }
    out
}
