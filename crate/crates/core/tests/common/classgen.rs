//! Random programs over the semigroup/monoid hierarchy, using ground
//! instances (`Nat`) and parametric ones (`option`, `list`, `prod`), with
//! and without instance constraints.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PRELUDE: &str = "\
datatype Nat = Zero | Suc Nat
datatype 'a list = Nil | Cons 'a ('a list)
datatype 'a option = None | Some 'a
datatype ('a, 'b) prod = Pair 'a 'b

class semigroup where
  (+) :: 'a => 'a => 'a

class monoid ⊆ semigroup where
  zero :: 'a

instance Nat :: semigroup where
  a + Zero = a
  Zero + a = a
  (Suc a) + b = Suc (a + b)

instance Nat :: monoid where
  zero = Zero

instance 'a option :: semigroup when 'a :: semigroup where
  None + y = y
  x + None = x
  (Some a) + (Some b) = Some (a + b)

instance 'a option :: monoid when 'a :: semigroup where
  zero = None

instance 'a list :: semigroup where
  Nil + ys = ys
  (Cons x xs) + ys = Cons x (xs + ys)

instance 'a list :: monoid where
  zero = Nil

instance ('a, 'b) prod :: semigroup when 'a :: semigroup, 'b :: semigroup where
  (Pair a b) + (Pair c d) = Pair (a + c) (b + d)

instance ('a, 'b) prod :: monoid when 'a :: monoid, 'b :: monoid where
  zero = Pair zero zero

fun fold :: ('a => 'b => 'b) => 'a list => 'b => 'b where
  fold f Nil s = s
  fold f (Cons x xs) s = fold f xs (f x s)

fun sum :: ('a :: monoid) list => 'a where
  sum xs = fold (+) xs zero
";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CTy {
    A,
    Nat,
    Opt(Box<CTy>),
    List(Box<CTy>),
    Prod(Box<CTy>, Box<CTy>),
}

impl CTy {
    fn subst(&self, with: &CTy) -> CTy {
        match self {
            CTy::A => with.clone(),
            CTy::Nat => CTy::Nat,
            CTy::Opt(t) => CTy::Opt(Box::new(t.subst(with))),
            CTy::List(t) => CTy::List(Box::new(t.subst(with))),
            CTy::Prod(a, b) => CTy::Prod(Box::new(a.subst(with)), Box::new(b.subst(with))),
        }
    }

    fn mentions_a(&self) -> bool {
        match self {
            CTy::A => true,
            CTy::Nat => false,
            CTy::Opt(t) | CTy::List(t) => t.mentions_a(),
            CTy::Prod(a, b) => a.mentions_a() || b.mentions_a(),
        }
    }

    /// Source syntax; the first `'a` is annotated with `class` when given.
    fn source(&self, class: &mut Option<&str>) -> String {
        match self {
            CTy::A => match class.take() {
                Some(c) => format!("('a :: {c})"),
                None => "'a".into(),
            },
            CTy::Nat => "Nat".into(),
            CTy::Opt(t) => format!("({} option)", t.source(class)),
            CTy::List(t) => format!("({} list)", t.source(class)),
            CTy::Prod(a, b) => {
                let a = a.source(class);
                format!("(({a}, {}) prod)", b.source(class))
            }
        }
    }
}

fn unify(pattern: &CTy, target: &CTy, binding: &mut Option<CTy>) -> bool {
    match (pattern, target) {
        (CTy::A, t) => match binding {
            Some(b) => b == t,
            None => {
                *binding = Some(t.clone());
                true
            }
        },
        (CTy::Nat, CTy::Nat) => true,
        (CTy::Opt(x), CTy::Opt(y)) | (CTy::List(x), CTy::List(y)) => unify(x, y, binding),
        (CTy::Prod(a, b), CTy::Prod(c, d)) => unify(a, c, binding) && unify(b, d, binding),
        _ => false,
    }
}

/// Whether `t` has a monoid instance when `'a` is a monoid iff `a_monoid`.
/// Every type here is a semigroup.
fn is_monoid(t: &CTy, a_monoid: bool) -> bool {
    match t {
        CTy::A => a_monoid,
        CTy::Nat | CTy::Opt(_) | CTy::List(_) => true,
        CTy::Prod(a, b) => is_monoid(a, a_monoid) && is_monoid(b, a_monoid),
    }
}

#[derive(Clone, Debug)]
pub struct CFun {
    pub name: String,
    pub monoid: bool,
    pub params: Vec<CTy>,
    pub result: CTy,
}

#[derive(Clone, Debug)]
pub struct ClassProgram {
    pub source: String,
    pub calls: Vec<(String, Vec<String>)>,
}

struct Cx<'r> {
    rng: &'r mut ChaCha8Rng,
    funs: Vec<CFun>,
    current: Option<CFun>,
    fresh: usize,
    budget: usize,
}

impl Cx<'_> {
    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn a_monoid(&self) -> bool {
        self.current.as_ref().is_some_and(|f| f.monoid)
    }

    fn ty(&mut self, depth: usize, with_a: bool) -> CTy {
        let roll = self.rng.gen_range(0..10);
        if depth == 0 || roll < 3 {
            return if with_a && self.rng.gen_bool(0.6) { CTy::A } else { CTy::Nat };
        }
        match roll {
            3..=4 => CTy::Opt(Box::new(self.ty(depth - 1, with_a))),
            5..=7 => CTy::List(Box::new(self.ty(depth - 1, with_a))),
            8 => CTy::Prod(Box::new(self.ty(depth - 1, with_a)), Box::new(self.ty(depth - 1, with_a))),
            _ => {
                if with_a {
                    CTy::A
                } else {
                    CTy::Nat
                }
            }
        }
    }

    fn term(&mut self, ty: &CTy, vars: &mut Vec<(String, CTy)>, depth: usize) -> Option<String> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        let mut choices = vec![0u8, 0, 0, 0, 1, 1, 1, 2, 3, 4, 5, 5, 6, 6, 6, 7];
        choices.shuffle(self.rng);
        for c in choices {
            let got = match c {
                0 => {
                    let fits: Vec<&String> = vars.iter().filter(|(_, t)| t == ty).map(|(n, _)| n).collect();
                    fits.choose(self.rng).map(|n| n.to_string())
                }
                1 if depth > 0 => {
                    let a = self.term(ty, vars, depth - 1)?;
                    let b = self.term(ty, vars, depth - 1)?;
                    Some(format!("({a} + {b})"))
                }
                2 if is_monoid(ty, self.a_monoid()) && self.rng.gen_bool(0.3) => Some("zero".into()),
                3 => self.ctor(ty, vars, depth),
                4 if depth > 0 && is_monoid(ty, self.a_monoid()) => {
                    let es = self.term(&CTy::List(Box::new(ty.clone())), vars, depth - 1)?;
                    Some(format!("(sum {es})"))
                }
                5 if depth > 0 => self.call(ty, vars, depth),
                6 if depth > 0 => self.case(ty, vars, depth),
                7 if depth > 0 => {
                    let es = self.term(&CTy::List(Box::new(ty.clone())), vars, depth - 1)?;
                    let e = self.term(ty, vars, depth - 1)?;
                    Some(if self.rng.gen_bool(0.5) {
                        format!("(fold (+) {es} {e})")
                    } else {
                        let (x, acc) = (self.name("x"), self.name("acc"));
                        format!("(fold (\\{x}. \\{acc}. ({acc} + {x})) {es} {e})")
                    })
                }
                _ => None,
            };
            if got.is_some() {
                return got;
            }
        }
        None
    }

    fn ctor(&mut self, ty: &CTy, vars: &mut Vec<(String, CTy)>, depth: usize) -> Option<String> {
        let deeper = depth > 0 && self.rng.gen_bool(0.6);
        let d = depth.saturating_sub(1);
        match ty {
            CTy::A => None,
            CTy::Nat if deeper => Some(format!("(Suc {})", self.term(ty, vars, d)?)),
            CTy::Nat => Some("Zero".into()),
            CTy::Opt(t) if deeper => Some(format!("(Some {})", self.term(t, vars, d)?)),
            CTy::Opt(_) => Some("None".into()),
            CTy::List(t) if deeper => {
                let x = self.term(t, vars, d)?;
                Some(format!("(Cons {x} {})", self.term(ty, vars, d)?))
            }
            CTy::List(_) => Some("Nil".into()),
            CTy::Prod(a, b) => {
                let x = self.term(a, vars, d)?;
                Some(format!("(Pair {x} {})", self.term(b, vars, d)?))
            }
        }
    }

    fn call(&mut self, ty: &CTy, vars: &mut Vec<(String, CTy)>, depth: usize) -> Option<String> {
        let mut order: Vec<usize> = (0..self.funs.len()).collect();
        order.shuffle(self.rng);
        for j in order {
            let g = self.funs[j].clone();
            let mut binding = None;
            if !unify(&g.result, ty, &mut binding) {
                continue;
            }
            // Without a result mentioning `'a`, the first argument has to fix
            // the instantiation or the call would be ambiguous.
            let pin = binding.is_none();
            let inst = match binding {
                Some(b) => b,
                None => {
                    let with_a = self.current.is_some();
                    self.ty(1, with_a)
                }
            };
            if g.monoid && !is_monoid(&inst, self.a_monoid()) {
                continue;
            }
            let mut s = g.name.clone();
            for (i, p) in g.params.iter().enumerate() {
                let t = if pin && i == 0 {
                    self.pinned(&p.subst(&inst), vars, depth - 1)?
                } else {
                    self.term(&p.subst(&inst), vars, depth - 1)?
                };
                s.push(' ');
                s.push_str(&t);
            }
            return Some(format!("({s})"));
        }
        None
    }

    /// A term whose type is determined without any context.
    fn pinned(&mut self, ty: &CTy, vars: &mut Vec<(String, CTy)>, depth: usize) -> Option<String> {
        let fits: Vec<&String> = vars.iter().filter(|(_, t)| t == ty).map(|(n, _)| n).collect();
        if let Some(v) = fits.choose(self.rng) {
            return Some(v.to_string());
        }
        match ty {
            CTy::A => None,
            CTy::Nat if depth > 0 && self.rng.gen_bool(0.5) => {
                Some(format!("(Suc {})", self.term(ty, vars, depth - 1)?))
            }
            CTy::Nat => Some("Zero".into()),
            CTy::Opt(t) => Some(format!("(Some {})", self.pinned(t, vars, depth.saturating_sub(1))?)),
            CTy::List(t) => {
                let x = self.pinned(t, vars, depth.saturating_sub(1))?;
                Some(format!("(Cons {x} {})", self.term(ty, vars, depth.saturating_sub(1))?))
            }
            CTy::Prod(a, b) => {
                let x = self.pinned(a, vars, depth.saturating_sub(1))?;
                Some(format!("(Pair {x} {})", self.pinned(b, vars, depth.saturating_sub(1))?))
            }
        }
    }

    fn case(&mut self, ty: &CTy, vars: &mut Vec<(String, CTy)>, depth: usize) -> Option<String> {
        let cands: Vec<(String, CTy)> = vars.iter().filter(|(_, t)| *t != CTy::A).cloned().collect();
        let (v, vty) = cands.choose(self.rng)?.clone();
        let mark = vars.len();
        let mut clauses = Vec::new();
        let mut clause = |cx: &mut Self, pat: String, bound: Vec<(String, CTy)>| -> Option<()> {
            vars.extend(bound);
            let body = cx.term(ty, vars, depth - 1);
            vars.truncate(mark);
            clauses.push(format!("{pat} => {}", body?));
            Some(())
        };
        match &vty {
            CTy::Nat => {
                clause(self, "Zero".into(), vec![])?;
                let n = self.name("n");
                clause(self, format!("(Suc {n})"), vec![(n, CTy::Nat)])?;
            }
            CTy::Opt(t) => {
                clause(self, "None".into(), vec![])?;
                let y = self.name("y");
                clause(self, format!("(Some {y})"), vec![(y, (**t).clone())])?;
            }
            CTy::List(t) => {
                let (y, ys) = (self.name("y"), self.name("ys"));
                clause(self, format!("(Cons {y} {ys})"), vec![(y, (**t).clone()), (ys, vty.clone())])?;
                clause(self, "Nil".into(), vec![])?;
            }
            CTy::Prod(a, b) => {
                let (y, z) = (self.name("y"), self.name("z"));
                clause(self, format!("(Pair {y} {z})"), vec![(y, (**a).clone()), (z, (**b).clone())])?;
            }
            CTy::A => unreachable!("filtered"),
        }
        Some(format!("(case {v} of {})", clauses.join(" | ")))
    }

    fn function(&mut self, name: String) -> Option<(CFun, String)> {
        let monoid = self.rng.gen_bool(0.6);
        let n = self.rng.gen_range(1..=3);
        let mut params = Vec::new();
        for i in 0..n {
            let mut t = self.ty(2, true);
            while i == 0 && !t.mentions_a() {
                t = self.ty(2, true);
            }
            params.push(t);
        }
        let result = self.ty(2, true);
        let f = CFun {
            name,
            monoid,
            params,
            result,
        };
        self.current = Some(f.clone());
        self.budget = 1_500;
        let vars: Vec<(String, CTy)> = f.params.iter().map(|t| (self.name("p"), t.clone())).collect();
        let rhs = self.term(&f.result, &mut vars.clone(), 3);
        self.current = None;
        let rhs = rhs?;
        let mut class = Some(if monoid { "monoid" } else { "semigroup" });
        let sig: Vec<String> = f
            .params
            .iter()
            .chain([&f.result])
            .map(|t| t.source(&mut class))
            .collect();
        let mut text = String::new();
        let _ = writeln!(text, "fun {} :: {} where", f.name, sig.join(" => "));
        let names: Vec<&str> = vars.iter().map(|(n, _)| n.as_str()).collect();
        let _ = writeln!(text, "  {} {} = {rhs}", f.name, names.join(" "));
        Some((f, text))
    }

    /// A ground value; with `pinned` no `None` or `Nil` hides its type.
    fn value(&mut self, ty: &CTy, depth: usize, pinned: bool) -> String {
        let deeper = depth > 0 && self.rng.gen_bool(0.7);
        let d = depth.saturating_sub(1);
        match ty {
            CTy::A => unreachable!("ground"),
            CTy::Nat if deeper => format!("(Suc {})", self.value(ty, d, false)),
            CTy::Nat => "Zero".into(),
            CTy::Opt(t) if deeper || pinned => format!("(Some {})", self.value(t, d, pinned)),
            CTy::Opt(_) => "None".into(),
            CTy::List(t) if deeper || pinned => {
                let x = self.value(t, d, pinned);
                format!("(Cons {x} {})", self.value(ty, d, false))
            }
            CTy::List(_) => "Nil".into(),
            CTy::Prod(a, b) => {
                let x = self.value(a, d, pinned);
                format!("(Pair {x} {})", self.value(b, d, pinned))
            }
        }
    }

}

pub fn program(rng: &mut ChaCha8Rng, funs: usize, calls: usize) -> ClassProgram {
    let mut cx = Cx {
        rng,
        funs: Vec::new(),
        current: None,
        fresh: 0,
        budget: 0,
    };
    let mut source = PRELUDE.to_string();
    for k in 0..funs {
        let made = (0..50).find_map(|_| cx.function(format!("g{k}")));
        if let Some((f, text)) = made {
            source.push('\n');
            source.push_str(&text);
            cx.funs.push(f);
        }
    }
    let mut out = Vec::new();
    for _ in 0..calls {
        let Some(f) = cx.funs.choose(cx.rng).cloned() else {
            break;
        };
        let inst = loop {
            let t = cx.ty(2, false);
            if !f.monoid || is_monoid(&t, false) {
                break t;
            }
        };
        let args = f
            .params
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = cx.rng.gen_range(1..=4);
                cx.value(&p.subst(&inst), d, i == 0)
            })
            .collect();
        out.push((f.name.clone(), args));
    }
    ClassProgram { source, calls: out }
}
