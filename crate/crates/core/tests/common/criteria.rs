//! Checks behind the acceptance criteria, parameterized by size so the
//! acceptance target and the focused tests can share them.

use std::fmt;

use fungo_core::backend::{Backend, FragmentBackend, OracleBackend, Outcome, Session};
use fungo_core::emit;
use fungo_core::go_ast::{check_wf, geval_expr, render_decl, GFailure, GValue, GoDecl, GoExpr, MATCH_FAILED};
use fungo_core::parser;
use rand::Rng;
use rayon::prelude::*;

use super::classgen;
use super::gen::{self, Limits};
use super::golden::{collapse_ws, first_difference, rename, tokens};
use super::listings;
use super::tpeval::{Fail, TypePassing};

pub const FUEL: u64 = 200_000;

#[derive(Debug, Default)]
pub struct Report {
    pub programs: usize,
    pub runs: usize,
    pub agreed: usize,
    /// Agreed runs that ended in a match failure.
    pub match_failed: usize,
    pub out_of_fuel: usize,
    pub failures: Vec<String>,
}

impl Report {
    fn merge(mut self, other: Report) -> Report {
        self.programs += other.programs;
        self.runs += other.runs;
        self.agreed += other.agreed;
        self.match_failed += other.match_failed;
        self.out_of_fuel += other.out_of_fuel;
        self.failures.extend(other.failures);
        self
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} programs, {} runs, {} agreed ({} match failures), {} out of fuel, {} failures",
            self.programs,
            self.runs,
            self.agreed,
            self.match_failed,
            self.out_of_fuel,
            self.failures.len()
        )
    }
}

/// Compiles one generated program and runs its entry calls on both
/// backends.
pub fn differential_one(seed: u64, limits: &Limits) -> Report {
    let mut rng = super::rng(seed);
    let g = gen::program(&mut rng, limits);
    let mut report = Report {
        programs: 1,
        ..Report::default()
    };
    let fail = |msg: String| format!("seed {seed}: {msg}\n---\n{}", g.source);
    let s = super::session(&g.source);
    match s.go_program() {
        Ok(prog) => {
            let wf = check_wf(&prog.decls);
            if !wf.is_empty() {
                report.failures.push(fail(format!("check_wf: {wf:?}")));
                return report;
            }
        }
        Err(e) => {
            report.failures.push(fail(format!("codegen: {e}")));
            return report;
        }
    }
    for (entry, args) in &g.calls {
        let args = args.iter().map(|a| format!("({a})")).collect::<Vec<_>>().join(" ");
        let call = match parser::parse_entry(&s.source, entry, &args) {
            Ok(c) => c,
            Err(ds) => {
                report.failures.push(fail(format!("{entry} {args}: {ds:?}")));
                continue;
            }
        };
        report.runs += 1;
        let o = OracleBackend.run(&s, &call, FUEL);
        let f = FragmentBackend.run(&s, &call, FUEL);
        match (o, f) {
            (Ok(Outcome::OutOfFuel), _) | (_, Ok(Outcome::OutOfFuel)) => report.out_of_fuel += 1,
            (Ok(a), Ok(b)) if a == b => {
                report.agreed += 1;
                if a == Outcome::MatchFailed {
                    report.match_failed += 1;
                }
            }
            (a, b) => report
                .failures
                .push(fail(format!("{entry} {args}: oracle {a:?}, fragment {b:?}"))),
        }
    }
    report
}

pub fn differential(programs: u64, first_seed: u64, limits: &Limits) -> Report {
    (first_seed..first_seed + programs)
        .into_par_iter()
        .map(|seed| differential_one(seed, limits))
        .reduce(Report::default, Report::merge)
}

fn compiled(fixture: &str) -> Result<fungo_core::go_ast::GoProgram, String> {
    let s = super::session(&super::fixture(fixture));
    s.codegen()
        .and_then(|cg| cg.program("main"))
        .map_err(|e| format!("{fixture}: {e}"))
}

fn decl<'p>(prog: &'p fungo_core::go_ast::GoProgram, name: &str) -> Result<&'p GoDecl, String> {
    prog.decls
        .iter()
        .find(|d| d.name() == name)
        .ok_or_else(|| format!("no declaration `{name}`"))
}

/// Datatype declarations equal the listings after whitespace collapse.
pub fn datatype_goldens() -> Result<(), String> {
    let prog = compiled("fig1.fml")?;
    let mut rendered: Vec<String> = prog.decls.iter().map(|d| collapse_ws(&render_decl(d))).collect();
    rendered.sort();
    for want in listings::NAT.iter().chain(listings::LIST).chain([&listings::SUC_DEST]) {
        if !rendered.iter().any(|r| r == want) {
            return Err(format!("missing `{want}`"));
        }
    }
    Ok(())
}

/// Hd2 equals the listing token for token once clause blocks are inlined
/// and the local renaming is applied.
pub fn hd2_golden() -> Result<(), String> {
    let prog = compiled("fig1.fml")?;
    let GoDecl::Func(f) = decl(&prog, "Hd2")? else {
        return Err("Hd2 is not a function".into());
    };
    let mut flat = f.clone();
    flat.body = flat.body.flatten_blocks();
    let got = rename(tokens(&render_decl(&GoDecl::Func(flat))), listings::HD2_RENAMING);
    let want = tokens(listings::HD2);
    match first_difference(&got, &want) {
        None => Ok(()),
        Some(d) => Err(d),
    }
}

/// Both spellings of hd2 give byte-identical files.
pub fn hd2_forms_identical() -> Result<(), String> {
    let out = |f: &str| {
        let s = super::session(&super::fixture(f));
        emit::generate(&s, "hd2").map(|o| o.go).map_err(|e| e.to_string())
    };
    let (a, b) = (out("hd2_case.fml")?, out("hd2_equations.fml")?);
    if a == b {
        Ok(())
    } else {
        Err(format!("outputs differ:\n{a}\n---\n{b}"))
    }
}

/// Class records and Sum equal the listing token for token.
pub fn dict_golden() -> Result<(), String> {
    let prog = compiled("fig1.fml")?;
    let mut text = String::new();
    for name in ["Semigroup", "Monoid", "Sum"] {
        text.push_str(&render_decl(decl(&prog, name)?));
        text.push('\n');
    }
    match first_difference(&tokens(&text), &tokens(listings::DICTS)) {
        None => Ok(()),
        Some(d) => Err(d),
    }
}

/// Runs generated class programs on the type-passing evaluator (source
/// program) and on both backends (elaborated program).
pub fn erasure_one(seed: u64, funs: usize, calls: usize) -> Report {
    let mut rng = super::rng(seed);
    let g = classgen::program(&mut rng, funs, calls);
    let mut report = Report {
        programs: 1,
        ..Report::default()
    };
    let fail = |msg: String| format!("seed {seed}: {msg}\n---\n{}", g.source);
    let s = super::session(&g.source);
    if let Err(e) = s.go_program() {
        report.failures.push(fail(format!("codegen: {e}")));
        return report;
    }
    for (entry, args) in &g.calls {
        let args = args.iter().map(|a| format!("({a})")).collect::<Vec<_>>().join(" ");
        let call = match parser::parse_entry(&s.source, entry, &args) {
            Ok(c) => c,
            Err(ds) => {
                report.failures.push(fail(format!("{entry} {args}: {ds:?}")));
                continue;
            }
        };
        report.runs += 1;
        let reference = TypePassing::new(&s.source, FUEL).eval(&call.term, &Vec::new(), &Vec::new());
        let reference = match reference {
            Ok(v) => v.render(),
            Err(Fail::MatchFailed) => Outcome::MatchFailed.render(),
            Err(Fail::OutOfFuel) => {
                report.out_of_fuel += 1;
                continue;
            }
            Err(Fail::Stuck(m)) => {
                report.failures.push(fail(format!("{entry} {args}: type passing stuck: {m}")));
                continue;
            }
        };
        let o = OracleBackend.run(&s, &call, FUEL);
        let f = FragmentBackend.run(&s, &call, FUEL);
        match (o, f) {
            (Ok(Outcome::OutOfFuel), _) | (_, Ok(Outcome::OutOfFuel)) => report.out_of_fuel += 1,
            (Ok(a), Ok(b)) if a.render() == reference && a == b => {
                report.agreed += 1;
                if a == Outcome::MatchFailed {
                    report.match_failed += 1;
                }
            }
            (a, b) => report.failures.push(fail(format!(
                "{entry} {args}: type passing {reference}, oracle {a:?}, fragment {b:?}"
            ))),
        }
    }
    report
}

pub fn erasure(programs: u64, first_seed: u64) -> Report {
    (first_seed..first_seed + programs)
        .into_par_iter()
        .map(|seed| erasure_one(seed, 4, 5))
        .reduce(Report::default, Report::merge)
}

fn go_outcome(s: &Session, r: Result<GValue, GFailure>) -> Result<Outcome, String> {
    let cg = s.codegen().map_err(|e| e.to_string())?;
    match r {
        Ok(v) => cg.erase(&v).map(Outcome::Value).ok_or_else(|| "function value".into()),
        Err(GFailure::Panic(m)) if m == MATCH_FAILED => Ok(Outcome::MatchFailed),
        Err(GFailure::OutOfFuel) => Ok(Outcome::OutOfFuel),
        Err(e) => Err(e.to_string()),
    }
}

/// Evaluates closed terms both as a Go expression and as the statement form
/// wrapped in an immediately called function literal.
pub fn duality(terms: usize, first_seed: u64) -> Report {
    let per_program = 10;
    let programs = terms.div_ceil(per_program) as u64;
    (first_seed..first_seed + programs)
        .into_par_iter()
        .map(|seed| {
            let mut rng = super::rng(seed);
            let g = gen::program(&mut rng, &Limits::default());
            let s = super::session(&g.source);
            let mut report = Report {
                programs: 1,
                ..Report::default()
            };
            let prog = s.go_program().expect("generated programs compile");
            let cg = s.codegen().expect("generated programs compile");
            for t in gen::closed_terms(&mut rng, &g, per_program) {
                let fail = |msg: String| format!("seed {seed}: {t}: {msg}\n---\n{}", g.source);
                let entry = match parser::parse_term(&s.source, &t) {
                    Ok(e) => e,
                    Err(ds) => {
                        report.failures.push(fail(format!("{ds:?}")));
                        continue;
                    }
                };
                report.runs += 1;
                let term = s.elaborate_entry(&entry).expect("class-free terms elaborate");
                let expr = cg.entry_expr(&term).expect("expression form");
                let (body, ty) = cg.stmt_of(&term).expect("statement form");
                let iife = GoExpr::call_expr(GoExpr::func_lit(vec![], vec![ty], body), vec![]);
                let a = go_outcome(&s, geval_expr(prog, &expr, vec![], FUEL * 20));
                let b = go_outcome(&s, geval_expr(prog, &iife, vec![], FUEL * 20));
                match (a, b) {
                    (Ok(Outcome::OutOfFuel), _) | (_, Ok(Outcome::OutOfFuel)) => report.out_of_fuel += 1,
                    (Ok(a), Ok(b)) if a == b => {
                        report.agreed += 1;
                        if a == Outcome::MatchFailed {
                            report.match_failed += 1;
                        }
                    }
                    (a, b) => report.failures.push(fail(format!("expression {a:?}, statement {b:?}"))),
                }
            }
            report
        })
        .reduce(Report::default, Report::merge)
}

fn random_tree(rng: &mut impl Rng, depth: usize) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return "Leaf".into();
    }
    let l = random_tree(rng, depth - 1);
    let r = random_tree(rng, depth - 1);
    let x: i64 = rng.gen_range(-50..50);
    let x = if x < 0 { format!("(0 - {})", -x) } else { x.to_string() };
    let c = if rng.gen_bool(0.5) { "Red" } else { "Black" };
    format!("(Node {l} (Pair {x} {c}) {r})")
}

/// The balancing function: well formed, one block per equation, and the
/// same results on both backends for random trees of depth at most 5.
pub fn bali(trees: usize, seed: u64) -> Report {
    let mut report = Report {
        programs: 1,
        ..Report::default()
    };
    let s = super::session(&super::fixture("rbt.fml"));
    let prog = match s.go_program() {
        Ok(p) => p,
        Err(e) => {
            report.failures.push(format!("codegen: {e}"));
            return report;
        }
    };
    let wf = check_wf(&prog.decls);
    if !wf.is_empty() {
        report.failures.push(format!("check_wf: {wf:?}"));
    }
    match prog.decls.iter().find(|d| d.name().eq_ignore_ascii_case("balil")) {
        Some(GoDecl::Func(f)) if f.body.block_count() == 11 => {}
        Some(GoDecl::Func(f)) => report
            .failures
            .push(format!("{} clause blocks, expected 11", f.body.block_count())),
        _ => report.failures.push("no function for baliL".into()),
    }
    let mut rng = super::rng(seed);
    for _ in 0..trees {
        let (l, r) = (random_tree(&mut rng, 5), random_tree(&mut rng, 5));
        let x = rng.gen_range(0..100);
        let args = format!("({l}) {x} ({r})");
        let call = parser::parse_entry(&s.source, "baliL", &args).expect("tree arguments parse");
        report.runs += 1;
        let o = OracleBackend.run(&s, &call, FUEL);
        let f = FragmentBackend.run(&s, &call, FUEL);
        match (o, f) {
            (Ok(a), Ok(b)) if a == b => {
                report.agreed += 1;
                if a == Outcome::MatchFailed {
                    report.match_failed += 1;
                }
            }
            (a, b) => report
                .failures
                .push(format!("baliL {args}: oracle {a:?}, fragment {b:?}")),
        }
    }
    report
}

pub const FIXTURES: &[&str] = &[
    "fig1.fml",
    "hd2_case.fml",
    "hd2_equations.fml",
    "rbt.fml",
    "adapted.fml",
    "sum_int.fml",
];

/// Every fixture compiles to a well-formed file, and scrutinizing `nil`
/// panics with the match failure message.
pub fn well_formed_and_nil() -> Result<(), String> {
    for f in FIXTURES {
        let s = super::session(&super::fixture(f));
        emit::generate(&s, "main").map_err(|e| format!("{f}: {}", e.message))?;
    }
    let s = super::session(&super::fixture("hd2_equations.fml"));
    for args in ["nil", "(Cons Zero nil)", "(Cons Zero (Cons nil nil))"] {
        let call = parser::parse_entry(&s.source, "hd2", args).map_err(|ds| format!("{ds:?}"))?;
        let expect_panic = args != "(Cons Zero (Cons nil nil))";
        for b in [&OracleBackend as &dyn Backend, &FragmentBackend] {
            let got = b.run(&s, &call, FUEL).map_err(|e| e.to_string())?;
            if (got == Outcome::MatchFailed) != expect_panic {
                return Err(format!("{} on hd2 {args}: {}", b.name(), got.render()));
            }
        }
    }
    Ok(())
}
