use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selmer_sim::{all_levels, divides, generate_tower, validate, validate_tower, SelmerDatum, TowerDatum};
use systems::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Axioms,
    Appendix,
    Stark,
    Kolyvagin,
    Mrs,
    Main,
    Fitting,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [Suite::Axioms, Suite::Appendix, Suite::Stark, Suite::Kolyvagin, Suite::Mrs, Suite::Main, Suite::Fitting];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Appendix => "appendix",
            Suite::Stark => "stark",
            Suite::Kolyvagin => "kolyvagin",
            Suite::Mrs => "mrs",
            Suite::Main => "main",
            Suite::Fitting => "fitting",
            Suite::All => "all",
        }
    }
}

/// Expand `all`, drop duplicates and fix the order.
pub fn normalize(suites: &[Suite]) -> Vec<Suite> {
    let mut out: Vec<Suite> = if suites.contains(&Suite::All) { Suite::EACH.to_vec() } else { suites.to_vec() };
    out.sort();
    out.dedup();
    out
}

/// One datum (with an optional tower from its file) under verification.
pub struct Instance {
    pub label: String,
    pub datum: SelmerDatum,
    pub tower: Option<TowerDatum>,
    pub seed: u64,
    pub cap: u64,
}

fn panic_message(e: &(dyn std::any::Any + Send)) -> String {
    e.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| e.downcast_ref::<String>().cloned()).unwrap_or_else(|| "unknown panic".into())
}

/// `timed`, with a panic turned into FAIL.
fn run<E: std::fmt::Display>(name: &str, anchor: &str, f: impl FnOnce() -> Result<(), E>) -> CheckResult {
    catch_unwind(AssertUnwindSafe(|| timed(name, anchor, f)))
        .unwrap_or_else(|e| CheckResult::new(name, anchor, Verdict::Fail, Some(format!("panic: {}", panic_message(e.as_ref())))))
}

fn skipped(name: &str, anchor: &str, why: impl Into<String>) -> CheckResult {
    CheckResult::new(name, anchor, Verdict::Skipped, Some(why.into()))
}

/// PASS when the corrupted instance is caught; the failure it produced is
/// kept as the witness.
fn control(name: &str, anchor: &str, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    let mut caught = None;
    let mut res = run(name, anchor, || f().map(|w| caught = Some(w)));
    if let Some(w) = caught {
        res.witness = Some(format!("corrupted instance fails: {w}"));
    }
    res
}

impl Instance {
    fn name(&self, s: &str) -> String {
        if self.label.is_empty() {
            s.to_string()
        } else {
            format!("{} {s}", self.label)
        }
    }

    fn tower(&self) -> Result<TowerDatum, String> {
        match &self.tower {
            Some(t) => Ok(t.clone()),
            None => generate_tower(self.datum.seed, &self.datum, true).map_err(|e| e.to_string()),
        }
    }

    pub fn run(&self, suite: Suite) -> Vec<CheckResult> {
        match suite {
            Suite::Axioms => self.axioms(),
            Suite::Appendix => appendix::appendix_suite(self.seed),
            Suite::Stark => self.stark(),
            Suite::Kolyvagin => self.kolyvagin(),
            Suite::Mrs => self.with_tower(Self::mrs, &["Thm theorem bockstein", "Thm MRS"]),
            Suite::Main => self.with_tower(Self::main, &["Thm main", "Thm commutative theorem"]),
            Suite::Fitting => self.fitting(),
            Suite::All => Suite::EACH.iter().flat_map(|&s| self.run(s)).collect(),
        }
    }

    fn axioms(&self) -> Vec<CheckResult> {
        let rep = match &self.tower {
            Some(t) => validate_tower(t),
            None => validate(&self.datum),
        };
        rep.checks
            .into_iter()
            .map(|c| {
                let v = if c.pass { Verdict::Pass } else { Verdict::Fail };
                CheckResult::new(self.name(&format!("axiom {}", c.name)), "Synthetic axioms", v, c.witness)
            })
            .collect()
    }

    fn stark(&self) -> Vec<CheckResult> {
        let d = &self.datum;
        let mut out = Vec::new();
        let name = self.name("SS_r is free of rank one");
        if d.is_regular() {
            out.push(run(&name, "Thm structure unit 2", || -> Result<(), String> {
                let sm = stark_module(d, d.r()).map_err(|e| e.to_string())?;
                if sm.free_rank_one {
                    Ok(())
                } else {
                    Err(format!("|SS_r| = p^{}, |R| = p^{}, {} generators", sm.log_size, sm.ring_log_size, sm.ngens))
                }
            }));
        } else {
            let why = match stark_module(d, d.r()) {
                Ok(sm) => format!("datum is not regular; |SS_r| = p^{}, |R| = p^{}, free of rank one: {}", sm.log_size, sm.ring_log_size, sm.free_rank_one),
                Err(e) => format!("datum is not regular; {e}"),
            };
            out.push(skipped(&name, "Thm structure unit 2", why));
            return out;
        }
        out.push(run(&self.name("eps(z) is a Stark system"), "Thm theorem HU", || {
            stark_from_horizontal(d, &horizontal_family(d, &d.ring().one())).map(|_| ())
        }));
        out.push(run(&self.name("v transitions compose"), "Def def unit", || -> Result<(), String> {
            let ring = d.ring();
            let r = d.r();
            let eps = stark_from_horizontal(d, &horizontal_family(d, &ring.one())).map_err(|e| e.to_string())?;
            let levels = all_levels(d.s());
            for &m2 in &levels {
                for &m in levels.iter().filter(|&&m| divides(m, m2)) {
                    for &n in levels.iter().filter(|&&n| divides(n, m)) {
                        let vt = |a, b| v_transition(d, r, a, b).map_err(|e| e.to_string());
                        let direct = vt(m2, n)?.apply(&ring, eps.level(m2));
                        let composed = vt(m, n)?.apply(&ring, &vt(m2, m)?.apply(&ring, eps.level(m2)));
                        if direct != composed {
                            return Err(format!("chain {m2} -> {m} -> {n}"));
                        }
                    }
                }
            }
            Ok(())
        }));
        out
    }

    fn kolyvagin(&self) -> Vec<CheckResult> {
        let d = &self.datum;
        let eps = match stark_from_horizontal(d, &horizontal_family(d, &d.ring().one())) {
            Ok(e) => e,
            Err(e) => {
                let why = e.to_string();
                return ["Prop unit koly", "Thm isom dks ks", "Thm commutative theorem"]
                    .iter()
                    .map(|a| skipped(&self.name(&format!("{a} checks")), a, why.clone()))
                    .collect();
            }
        };
        let mut out = Vec::new();
        out.push(run(&self.name("Reg(eps) is a Kolyvagin system"), "Prop unit koly", || is_kolyvagin(d, &regulator(d, &eps))));
        out.push(run(&self.name("US to DKS lands in DKS"), "Thm commutative theorem", || is_dks(d, &us_to_dks(d, &eps))));
        out.push(run(&self.name("psi and psi_inv are inverse on 100 collections"), "Thm isom dks ks", || -> Result<(), String> {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x7073_69);
            let ring = d.ring();
            for i in 0..100 {
                let k = random_collection(d, &mut rng);
                let there = psi_inv_raw(d, &psi_raw(d, &k));
                let back = psi_raw(d, &psi_inv_raw(d, &k));
                if let Some((n, c)) = there.first_difference(&ring, &k).or_else(|| back.first_difference(&ring, &k)) {
                    return Err(format!("collection {i}, level {n}, coordinate {c}"));
                }
            }
            let kp = us_to_dks(d, &eps);
            let k = psi(d, &kp).map_err(|e| e.to_string())?;
            if psi_inv(d, &k).map_err(|e| e.to_string())? != kp {
                return Err("psi_inv(psi(US to DKS)) differs".into());
            }
            Ok(())
        }));
        out.push(run(&self.name("Psi(US to DKS) = Reg on eps and 20 multiples"), "Thm commutative theorem", || -> Result<(), String> {
            let ring = d.ring();
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x636f_6d6d);
            check_commutative(d, None, &eps).map_err(|e| format!("basis: {e}"))?;
            for i in 0..20 {
                let a: Vec<u64> = (0..ring.dim()).map(|_| rng.gen_range(0..d.modulus)).collect();
                check_commutative(d, None, &eps.scale(&ring, &a)).map_err(|e| format!("multiple {i}: {e}"))?;
            }
            Ok(())
        }));
        out.push(run(&self.name("D_{n,d} expansion equals its determinant"), "D determinant recursion", || -> Result<(), String> {
            for n in all_levels(d.s()) {
                for dd in all_levels(d.s()).into_iter().filter(|&x| divides(x, n)) {
                    if !d_identity_holds(d.modulus, &d.cross, n, dd) {
                        return Err(format!("n = {n}, d = {dd}"));
                    }
                }
            }
            Ok(())
        }));
        out
    }

    fn with_tower(&self, f: fn(&Self, &TowerDatum) -> Vec<CheckResult>, anchors: &[&str]) -> Vec<CheckResult> {
        match self.tower() {
            Ok(t) => f(self, &t),
            Err(e) => anchors.iter().map(|a| skipped(&self.name(&format!("{a} checks")), a, format!("no tower: {e}"))).collect(),
        }
    }

    fn mrs(&self, t: &TowerDatum) -> Vec<CheckResult> {
        let mut out = Vec::new();
        out.push(run(&self.name("Bockstein from the lifted complex equals the tables"), "Thm theorem bockstein", || bockstein_table_check(t)));
        out.push(run(&self.name("MRS at every level"), "Thm MRS", || check_mrs(t)));
        out.push(control(&self.name("MRS negative control"), "Thm MRS (control)", || {
            let bad = corrupt_for_mrs(t).ok_or("no corrupting patch found")?;
            match check_mrs(&bad) {
                Ok(()) => Err("corrupted tower passes".into()),
                Err(e) => Ok(e.to_string()),
            }
        }));
        out
    }

    fn main(&self, t: &TowerDatum) -> Vec<CheckResult> {
        let mut out = Vec::new();
        out.push(run(&self.name("Euler norm relations"), "Def def euler", || euler_from_tower(t, &vertical_family(t)).map(|_| ())));
        out.push(run(&self.name("D_r(c(z)) = Reg(eps(z))"), "Thm main", || check_main(t)));
        out.push(run(&self.name("Psi(US to DKS) = Reg with tower Bocksteins"), "Thm commutative theorem", || {
            check_commutative(&t.datum, Some(t), &tower_stark(t)?)
        }));
        out.push(run(&self.name("J is the unit ideal"), "Thm stark der thm 2", || -> Result<(), String> {
            let j = stark_ideal_j(t).map_err(|e| e.to_string())?;
            if j.is_unit() {
                Ok(())
            } else {
                Err(format!("J = {j:?}"))
            }
        }));
        let bad = corrupt_for_main(t);
        out.push(control(&self.name("main negative control"), "Thm main (control)", || {
            let bad = bad.as_ref().ok_or("no corrupting patch found")?;
            match check_main(bad) {
                Ok(()) => Err("corrupted tower passes".into()),
                Err(e) => Ok(e.to_string()),
            }
        }));
        out.push(control(&self.name("commutative negative control"), "Thm commutative theorem (control)", || {
            let bad = bad.as_ref().ok_or("no corrupting patch found")?;
            let eps = tower_stark(bad).map_err(|e| e.to_string())?;
            match check_commutative(&bad.datum, Some(bad), &eps) {
                Ok(()) => Err("corrupted tower passes".into()),
                Err(e) => Ok(e.to_string()),
            }
        }));
        out
    }

    fn fitting(&self) -> Vec<CheckResult> {
        let d = &self.datum;
        match stark_from_horizontal(d, &horizontal_family(d, &d.ring().one())) {
            Ok(eps) => check_fitting_theorems(d, &eps, self.cap)
                .into_iter()
                .map(|mut c| {
                    c.name = self.name(&c.name);
                    c
                })
                .collect(),
            Err(e) => vec![skipped(&self.name("Fitting ideals"), "Thm det unit fitt", e.to_string())],
        }
    }
}
