//! Random well-typed class-free programs, written as source text.
//!
//! Datatypes `d0`..`d3` take at most one parameter `'a`; the first
//! constructor of each is non-recursive so ground values always exist.
//! Functions only call earlier functions, and call themselves only on a
//! value bound strictly inside a constructor pattern of the same parameter,
//! so every run terminates.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    Data(usize, Vec<Ty>),
    Int,
    /// The type parameter `'a` of the enclosing declaration.
    Var,
    Fun(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn fun(a: Ty, b: Ty) -> Ty {
        Ty::Fun(Box::new(a), Box::new(b))
    }

    fn mentions_var(&self) -> bool {
        match self {
            Ty::Var => true,
            Ty::Int => false,
            Ty::Data(_, args) => args.iter().any(Ty::mentions_var),
            Ty::Fun(a, b) => a.mentions_var() || b.mentions_var(),
        }
    }

    fn subst(&self, with: &Ty) -> Ty {
        match self {
            Ty::Var => with.clone(),
            Ty::Int => Ty::Int,
            Ty::Data(i, args) => Ty::Data(*i, args.iter().map(|a| a.subst(with)).collect()),
            Ty::Fun(a, b) => Ty::fun(a.subst(with), b.subst(with)),
        }
    }

    pub fn source(&self) -> String {
        match self {
            Ty::Int => "int".into(),
            Ty::Var => "'a".into(),
            Ty::Data(i, args) if args.is_empty() => format!("d{i}"),
            Ty::Data(i, args) => format!("({} d{i})", args[0].source()),
            Ty::Fun(a, b) => format!("({} => {})", a.source(), b.source()),
        }
    }
}

/// Binds the callee's `'a` so that `pattern` equals `target`.
fn unify(pattern: &Ty, target: &Ty, binding: &mut Option<Ty>) -> bool {
    match (pattern, target) {
        (Ty::Var, t) => match binding {
            Some(b) => b == t,
            None => {
                *binding = Some(t.clone());
                true
            }
        },
        (Ty::Int, Ty::Int) => true,
        (Ty::Data(i, xs), Ty::Data(j, ys)) => {
            i == j && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, binding))
        }
        (Ty::Fun(a, b), Ty::Fun(c, d)) => unify(a, c, binding) && unify(b, d, binding),
        _ => false,
    }
}

#[derive(Clone, Debug)]
pub struct Data {
    pub param: bool,
    /// Constructor field types; `Ty::Var` is the datatype's own parameter.
    pub ctors: Vec<Vec<Ty>>,
}

pub fn ctor_name(d: usize, c: usize) -> String {
    format!("C{d}{}", (b'a' + c as u8) as char)
}

#[derive(Clone, Debug)]
pub struct Fun {
    pub name: String,
    pub poly: bool,
    pub params: Vec<Ty>,
    pub result: Ty,
}

impl Fun {
    /// Curried argument types followed by the final result.
    fn spine(&self) -> (Vec<Ty>, Ty) {
        let mut args = self.params.clone();
        let mut r = self.result.clone();
        while let Ty::Fun(a, b) = r {
            args.push(*a);
            r = *b;
        }
        (args, r)
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub source: String,
    pub datas: Vec<Data>,
    pub funs: Vec<Fun>,
    /// Entry calls: function name and atomic argument terms.
    pub calls: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub datas: usize,
    pub funs: usize,
    pub pattern_depth: usize,
    pub calls: usize,
    /// Chance that an argument of a multi-constructor type is `nil`.
    pub nil_rate: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            datas: 4,
            funs: 6,
            pattern_depth: 3,
            calls: 6,
            nil_rate: 0.04,
        }
    }
}

struct Var {
    name: String,
    ty: Ty,
    /// Parameter index this variable is a strict subterm of.
    below: Option<usize>,
    /// Parameter index this variable is bound to as a whole.
    param: Option<usize>,
}

struct Cx<'r> {
    rng: &'r mut ChaCha8Rng,
    datas: Vec<Data>,
    funs: Vec<Fun>,
    /// Function being generated, if any, with its parameter types.
    current: Option<Fun>,
    fresh: usize,
    /// Term nodes left before generation gives up on a function.
    budget: usize,
}

impl Cx<'_> {
    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn data_ctor_fields(&self, d: usize, args: &[Ty], c: usize) -> Vec<Ty> {
        let arg = args.first().cloned().unwrap_or(Ty::Int);
        self.datas[d].ctors[c].iter().map(|f| f.subst(&arg)).collect()
    }

    /// A small ground type, or one mentioning `'a` when `var` is set.
    fn small_type(&mut self, depth: usize, var: bool) -> Ty {
        if var && self.rng.gen_bool(0.25) {
            return Ty::Var;
        }
        if self.rng.gen_bool(0.12) {
            return Ty::Int;
        }
        let i = self.rng.gen_range(0..self.datas.len());
        if !self.datas[i].param {
            return Ty::Data(i, vec![]);
        }
        let arg = if depth == 0 {
            if var && self.rng.gen_bool(0.5) {
                Ty::Var
            } else {
                Ty::Int
            }
        } else {
            self.small_type(depth - 1, var)
        };
        Ty::Data(i, vec![arg])
    }

    fn datatypes(&mut self, count: usize) {
        for i in 0..count {
            let param = self.rng.gen_bool(0.5);
            let self_ty = Ty::Data(i, if param { vec![Ty::Var] } else { vec![] });
            let n_ctors = self.rng.gen_range(1..=3);
            let mut ctors = Vec::new();
            for c in 0..n_ctors {
                let n_fields = if c == 0 && n_ctors > 1 && self.rng.gen_bool(0.6) {
                    0
                } else {
                    self.rng.gen_range(0..=3)
                };
                let mut fields = Vec::new();
                for _ in 0..n_fields {
                    let roll = self.rng.gen_range(0..10);
                    let ty = if c > 0 && roll < 4 {
                        self_ty.clone()
                    } else if param && roll < 6 {
                        Ty::Var
                    } else if i > 0 && roll < 9 {
                        let j = self.rng.gen_range(0..i);
                        if self.datas[j].param {
                            let arg = if param && self.rng.gen_bool(0.5) {
                                Ty::Var
                            } else {
                                Ty::Int
                            };
                            Ty::Data(j, vec![arg])
                        } else {
                            Ty::Data(j, vec![])
                        }
                    } else {
                        Ty::Int
                    };
                    fields.push(ty);
                }
                ctors.push(fields);
            }
            self.datas.push(Data { param, ctors });
        }
    }

    /// A pattern of type `ty`. Variables nested under a constructor are
    /// recorded as strictly below `param`; a top-level variable is below it
    /// only when `top_below` holds.
    fn pattern(
        &mut self,
        ty: &Ty,
        depth: usize,
        param: Option<usize>,
        top_below: bool,
        vars: &mut Vec<Var>,
    ) -> String {
        if let Ty::Data(d, args) = ty {
            if depth > 0 && self.rng.gen_bool(0.65) {
                let c = self.rng.gen_range(0..self.datas[*d].ctors.len());
                let fields = self.data_ctor_fields(*d, args, c);
                let mut s = ctor_name(*d, c);
                if fields.is_empty() {
                    return s;
                }
                for f in &fields {
                    let sub = self.pattern(f, depth - 1, param, true, vars);
                    s.push(' ');
                    s.push_str(&sub);
                }
                return format!("({s})");
            }
        }
        let name = self.name("v");
        vars.push(Var {
            name: name.clone(),
            ty: ty.clone(),
            below: if top_below { param } else { None },
            param: None,
        });
        name
    }

    /// Closed or open term of type `ty` over `vars`.
    fn term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        let mut choices: Vec<u8> = vec![0, 1, 1, 2, 3, 3, 4, 5, 6, 7, 8];
        choices.shuffle(self.rng);
        for choice in choices {
            let got = match choice {
                0 => self.var_of(ty, vars),
                1 => self.ctor_term(ty, vars, depth),
                2 => self.int_term(ty, vars, depth),
                3 if depth > 0 => self.call(ty, vars, depth),
                4 if depth > 0 => self.self_call(ty, vars, depth),
                5 if depth > 0 => self.case_term(ty, vars, depth),
                6 => self.fun_term(ty, vars, depth),
                7 if depth > 0 => self.apply_var(ty, vars, depth),
                8 if depth > 0 => self.case_of_term(ty, vars, depth),
                _ => None,
            };
            if got.is_some() {
                return got;
            }
        }
        // Last resort: anything that fits, ignoring the depth budget.
        self.var_of(ty, vars)
            .or_else(|| self.ctor_term(ty, vars, depth.max(1)))
            .or_else(|| self.int_term(ty, vars, 0))
            .or_else(|| self.fun_term(ty, vars, depth.max(1)))
    }

    fn var_of(&mut self, ty: &Ty, vars: &[Var]) -> Option<String> {
        let fits: Vec<&Var> = vars.iter().filter(|v| v.ty == *ty).collect();
        fits.choose(self.rng).map(|v| v.name.clone())
    }

    fn int_term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        if *ty != Ty::Int {
            return None;
        }
        if depth > 0 && self.rng.gen_bool(0.4) {
            let a = self.term(&Ty::Int, vars, depth - 1)?;
            let b = self.term(&Ty::Int, vars, depth - 1)?;
            let op = ["+", "-", "*"].choose(self.rng).expect("ops");
            return Some(format!("({a} {op} {b})"));
        }
        Some(match self.rng.gen_range(0..30) {
            0 => "123456789012345678901234567890".into(),
            1..=3 => "(0 - 7)".into(),
            _ => self.rng.gen_range(0..10).to_string(),
        })
    }

    fn ctor_term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let Ty::Data(d, args) = ty else {
            return None;
        };
        let n = self.datas[*d].ctors.len();
        let c = if depth == 0 { 0 } else { self.rng.gen_range(0..n) };
        let fields = self.data_ctor_fields(*d, args, c);
        let mut s = ctor_name(*d, c);
        if fields.is_empty() {
            return Some(s);
        }
        for f in &fields {
            let a = self.term(f, vars, depth.saturating_sub(1))?;
            s.push(' ');
            s.push_str(&a);
        }
        Some(format!("({s})"))
    }

    /// Applies a head of curried type `args => result` to as many arguments
    /// as make the result `ty`.
    fn saturate_to(
        &mut self,
        head: String,
        args: &[Ty],
        result: &Ty,
        poly: bool,
        ty: &Ty,
        vars: &mut Vec<Var>,
        depth: usize,
    ) -> Option<String> {
        let mut options = Vec::new();
        for k in 0..=args.len() {
            let rest = args[k..]
                .iter()
                .rev()
                .fold(result.clone(), |r, a| Ty::fun(a.clone(), r));
            let mut binding = None;
            let ok = if poly {
                unify(&rest, ty, &mut binding)
            } else {
                rest == *ty
            };
            if ok {
                options.push((k, binding));
            }
        }
        let (k, binding) = options.choose(self.rng)?.clone();
        let inst = match binding {
            Some(b) => b,
            None => {
                let var = self.current.as_ref().is_some_and(|f| f.poly);
                self.small_type(1, var)
            }
        };
        let mut s = head;
        for a in &args[..k] {
            let a = if poly { a.subst(&inst) } else { a.clone() };
            let t = self.term(&a, vars, depth - 1)?;
            s.push(' ');
            s.push_str(&t);
        }
        Some(if k == 0 { s } else { format!("({s})") })
    }

    fn call(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let mut order: Vec<usize> = (0..self.funs.len()).collect();
        order.shuffle(self.rng);
        for j in order {
            let f = self.funs[j].clone();
            let (args, result) = f.spine();
            if let Some(s) = self.saturate_to(f.name.clone(), &args, &result, f.poly, ty, vars, depth) {
                return Some(s);
            }
        }
        // Partially applied constructors.
        if let Ty::Fun(..) = ty {
            let d = self.rng.gen_range(0..self.datas.len());
            let c = self.rng.gen_range(0..self.datas[d].ctors.len());
            let args = self.datas[d].ctors[c].clone();
            if !args.is_empty() {
                let data = &self.datas[d];
                let result = Ty::Data(d, if data.param { vec![Ty::Var] } else { vec![] });
                let poly = data.param;
                return self.saturate_to(ctor_name(d, c), &args, &result, poly, ty, vars, depth);
            }
        }
        None
    }

    fn self_call(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let f = self.current.clone()?;
        if f.result != *ty {
            return None;
        }
        let smaller: Vec<(usize, String)> = vars
            .iter()
            .filter_map(|v| {
                let i = v.below?;
                (f.params[i] == v.ty).then(|| (i, v.name.clone()))
            })
            .collect();
        let (i, arg) = smaller.choose(self.rng)?.clone();
        let mut s = f.name.clone();
        for (k, p) in f.params.iter().enumerate() {
            let t = if k == i {
                arg.clone()
            } else {
                // Arguments of a recursive call may not themselves recurse
                // on unrelated values; keep them shallow.
                self.term(p, vars, (depth - 1).min(1))?
            };
            s.push(' ');
            s.push_str(&t);
        }
        Some(format!("({s})"))
    }

    fn case_term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let scrutinees: Vec<(String, Ty, Option<usize>, Option<usize>)> = vars
            .iter()
            .filter(|v| matches!(v.ty, Ty::Data(..)))
            .map(|v| (v.name.clone(), v.ty.clone(), v.below, v.param))
            .collect();
        let (name, sty, below, param) = scrutinees.choose(self.rng)?.clone();
        let n = self.rng.gen_range(1..=3);
        let mut clauses = Vec::new();
        for _ in 0..n {
            let mark = vars.len();
            let pat = match below {
                Some(_) => self.pattern(&sty, 2, below, true, vars),
                None => self.pattern(&sty, 2, param, false, vars),
            };
            let body = self.term(ty, vars, depth - 1);
            vars.truncate(mark);
            clauses.push(format!("{pat} => {}", body?));
        }
        Some(format!("(case {name} of {})", clauses.join(" | ")))
    }

    /// Case on a freshly built scrutinee rather than a variable.
    fn case_of_term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let sty = self.small_type(1, false);
        if !matches!(sty, Ty::Data(..)) {
            return None;
        }
        let scrutinee = self.term(&sty, vars, depth - 1)?;
        let n = self.rng.gen_range(1..=3);
        let catch_all = self.rng.gen_bool(0.5);
        let mut clauses = Vec::new();
        for i in 0..n {
            let mark = vars.len();
            let pat_depth = if catch_all && i + 1 == n { 0 } else { 2 };
            let pat = self.pattern(&sty, pat_depth, None, false, vars);
            let body = self.term(ty, vars, depth - 1);
            vars.truncate(mark);
            clauses.push(format!("{pat} => {}", body?));
        }
        Some(format!("(case {scrutinee} of {})", clauses.join(" | ")))
    }

    fn fun_term(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let Ty::Fun(a, b) = ty else {
            return None;
        };
        if depth > 0 && self.rng.gen_bool(0.5) {
            if let Some(s) = self.call(ty, vars, depth) {
                return Some(s);
            }
        }
        let x = self.name("l");
        vars.push(Var {
            name: x.clone(),
            ty: (**a).clone(),
            below: None,
            param: None,
        });
        let body = self.term(b, vars, depth.saturating_sub(1));
        vars.pop();
        Some(format!("(\\{x}. {})", body?))
    }

    fn apply_var(&mut self, ty: &Ty, vars: &mut Vec<Var>, depth: usize) -> Option<String> {
        let fits: Vec<(String, Ty)> = vars
            .iter()
            .filter_map(|v| match &v.ty {
                Ty::Fun(a, b) if **b == *ty => Some((v.name.clone(), (**a).clone())),
                _ => None,
            })
            .collect();
        let (g, a) = fits.choose(self.rng)?.clone();
        let arg = self.term(&a, vars, depth - 1)?;
        Some(format!("({g} {arg})"))
    }

    fn signature(&mut self, name: String) -> Fun {
        let poly = self.rng.gen_bool(0.3);
        let n = self.rng.gen_range(1..=3);
        let mut params = Vec::new();
        // The first parameter is a datatype so there is something to match.
        loop {
            let t = self.small_type(2, poly);
            if matches!(t, Ty::Data(..)) {
                params.push(t);
                break;
            }
        }
        for _ in 1..n {
            params.push(if self.rng.gen_bool(0.12) {
                let a = self.small_type(1, poly);
                let b = self.small_type(1, poly);
                Ty::fun(a, b)
            } else {
                self.small_type(2, poly)
            });
        }
        let poly = params.iter().any(Ty::mentions_var);
        let result = if self.rng.gen_bool(0.1) {
            let a = self.small_type(0, false);
            Ty::fun(a, self.small_type(1, poly))
        } else {
            self.small_type(2, poly)
        };
        Fun {
            name,
            poly,
            params,
            result,
        }
    }

    fn function(&mut self, f: &Fun, limits: &Limits) -> Option<String> {
        self.budget = 2_000;
        self.current = Some(f.clone());
        let mut out = String::new();
        let ty_src: Vec<String> = f
            .params
            .iter()
            .chain(std::iter::once(&f.result))
            .map(Ty::source)
            .collect();
        let _ = writeln!(out, "fun {} :: {} where", f.name, ty_src.join(" => "));
        // Either a single equation with a case body or several equations.
        let case_form = self.rng.gen_bool(0.2);
        let n_eqs = if case_form { 1 } else { self.rng.gen_range(1..=4) };
        // Often end in a catch-all so that not every run fails to match.
        let catch_all = self.rng.gen_bool(0.5);
        for e in 0..n_eqs {
            let mut vars = Vec::new();
            let mut pats = Vec::new();
            for (i, p) in f.params.iter().enumerate() {
                let depth = if case_form || (catch_all && e + 1 == n_eqs) {
                    0
                } else {
                    limits.pattern_depth
                };
                let mark = vars.len();
                let pat = self.pattern(p, depth, Some(i), false, &mut vars);
                if let [whole] = &mut vars[mark..] {
                    if whole.name == pat {
                        whole.param = Some(i);
                    }
                }
                pats.push(pat);
            }
            let rhs = if case_form {
                let first = vars[0].name.clone();
                let sty = f.params[0].clone();
                let n = self.rng.gen_range(1..=3);
                let mut clauses = Vec::new();
                for c in 0..n {
                    let mark = vars.len();
                    let depth = if catch_all && c + 1 == n { 0 } else { limits.pattern_depth };
                    let pat = self.pattern(&sty, depth, Some(0), false, &mut vars);
                    let body = self.term(&f.result, &mut vars, 3);
                    vars.truncate(mark);
                    clauses.push(format!("{pat} => {}", body?));
                }
                format!("case {first} of {}", clauses.join("\n    | "))
            } else {
                self.term(&f.result, &mut vars, 3)?
            };
            let _ = writeln!(out, "  {} {} = {rhs}", f.name, pats.join(" "));
        }
        self.current = None;
        Some(out)
    }

    fn value(&mut self, ty: &Ty, depth: usize, nil_rate: f64) -> String {
        if let Ty::Data(d, _) = ty {
            if self.datas[*d].ctors.len() > 1 && self.rng.gen_bool(nil_rate) {
                return "nil".into();
            }
        }
        match ty {
            Ty::Data(d, args) => {
                let n = self.datas[*d].ctors.len();
                let c = if depth == 0 { 0 } else { self.rng.gen_range(0..n) };
                let fields = self.data_ctor_fields(*d, args, c);
                let mut s = ctor_name(*d, c);
                if fields.is_empty() {
                    return s;
                }
                for f in &fields {
                    s.push(' ');
                    let v = self.value(f, depth.saturating_sub(1), 0.0);
                    s.push_str(&v);
                }
                format!("({s})")
            }
            Ty::Int => {
                let n: i64 = self.rng.gen_range(-20..100);
                if n < 0 {
                    format!("(0 - {})", -n)
                } else {
                    n.to_string()
                }
            }
            Ty::Fun(_, b) => {
                self.budget = 500;
                let made = self.term(ty, &mut Vec::new(), 2);
                made.unwrap_or_else(|| {
                    let body = self.value(b, 1, 0.0);
                    let x = self.name("l");
                    format!("(\\{x}. {body})")
                })
            }
            Ty::Var => unreachable!("entry types are ground"),
        }
    }
}

fn data_source(i: usize, d: &Data) -> String {
    let ctors: Vec<String> = d
        .ctors
        .iter()
        .enumerate()
        .map(|(c, fields)| {
            let mut s = ctor_name(i, c);
            for f in fields {
                s.push(' ');
                s.push_str(&f.source());
            }
            s
        })
        .collect();
    let head = if d.param { format!("'a d{i}") } else { format!("d{i}") };
    format!("datatype {head} = {}\n", ctors.join(" | "))
}

pub fn program(rng: &mut ChaCha8Rng, limits: &Limits) -> Generated {
    loop {
        if let Some(g) = try_program(rng, limits) {
            return g;
        }
    }
}

fn try_program(rng: &mut ChaCha8Rng, limits: &Limits) -> Option<Generated> {
    let mut cx = Cx {
        rng,
        datas: Vec::new(),
        funs: Vec::new(),
        current: None,
        fresh: 0,
        budget: 0,
    };
    let n_data = cx.rng.gen_range(1..=limits.datas);
    cx.datatypes(n_data);
    let mut source = String::new();
    for (i, d) in cx.datas.iter().enumerate() {
        source.push_str(&data_source(i, d));
    }
    let n_funs = cx.rng.gen_range(1..=limits.funs);
    for k in 0..n_funs {
        let mut made = None;
        for _ in 0..20 {
            let f = cx.signature(format!("f{k}"));
            if let Some(text) = cx.function(&f, limits) {
                made = Some((f, text));
                break;
            }
        }
        let (f, text) = made?;
        source.push('\n');
        source.push_str(&text);
        cx.funs.push(f);
    }
    let mut calls = Vec::new();
    for _ in 0..limits.calls {
        let f = cx.funs.choose(cx.rng).expect("functions").clone();
        let inst = cx.small_type(1, false);
        // Over-apply functions returning functions so results are printable.
        let (spine, _) = f.spine();
        let args = spine
            .iter()
            .map(|p| {
                let p = if f.poly { p.subst(&inst) } else { p.clone() };
                let depth = cx.rng.gen_range(0..=4);
                cx.value(&p, depth, limits.nil_rate)
            })
            .collect();
        calls.push((f.name.clone(), args));
    }
    Some(Generated {
        source,
        datas: cx.datas,
        funs: cx.funs,
        calls,
    })
}

/// Closed terms of ground type over the declarations of `g`.
pub fn closed_terms(rng: &mut ChaCha8Rng, g: &Generated, count: usize) -> Vec<String> {
    let mut cx = Cx {
        rng,
        datas: g.datas.clone(),
        funs: g.funs.clone(),
        current: None,
        fresh: 0,
        budget: 0,
    };
    let mut out = Vec::new();
    while out.len() < count {
        let ty = cx.small_type(1, false);
        cx.budget = 400;
        if let Some(t) = cx.term(&ty, &mut Vec::new(), 3) {
            out.push(t);
        }
    }
    out
}
