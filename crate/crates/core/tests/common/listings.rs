//! Reference listings the generated code must reproduce.

pub const NAT: &[&str] = &["type Nat any;", "type Zero struct { };", "type Suc struct { A Nat; };"];

pub const LIST: &[&str] = &[
    "type List[a any] interface {};",
    "type Nil[a any] struct { };",
    "type Cons[a any] struct { A a; Aa List[a]; };",
    "func Cons_dest[a any](p Cons[a])(a, List[a]) { return p.A, p.Aa; }",
];

pub const SUC_DEST: &str = "func Suc_dest(p Suc)(Nat) { return p.A; }";

pub const HD2: &str = r#"
func Hd2[a any] (x0 List[a]) Option[a] {
  if (x0 == (List[a](Nil[a]{}))) {
    return (Option[a](None[a]{}));
  }
  q, m := x0.(Cons[a]);
  if (m) {
    _, c := Cons_dest(q);
    if (c == (List[a](Nil[a]{}))) {
      return (Option[a](None[a]{}));
    }
  }
  q, m := x0.(Cons[a]);
  if (m) {
    _, p := Cons_dest(q);
    q, m := p.(Cons[a]);
    if (m) {
      ya, _ := Cons_dest(q);
      return (Option[a](Some[a]{ya}));
    }
  }
  panic("match failed");
}
"#;

/// Local names that differ between the listing and the generated code.
pub const HD2_RENAMING: &[(&str, &str)] = &[("y", "ya")];

pub const DICTS: &str = r#"
type Semigroup[a any] struct {
  Plus func(a, a) a
}

type Monoid[a any] struct {
  Semigroup_monoid Semigroup[a]
  Zero func () a
}

func Sum[a any] (a_ Monoid[a], xs List[a]) a {
  return Fold[a, a](
    func (aa a) func(a) a {
      return func (b a) a { return a_.Semigroup_monoid.Plus(aa, b); };
    },
    xs, a_.Zero()
  );
}
"#;
