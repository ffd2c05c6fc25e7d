package fig1

type Nat any;

type Zero struct {
};

type Suc struct {
	A Nat;
};

func Suc_dest(p Suc)(Nat) {
	return p.A;
}

type List[a any] interface {};

type Nil[a any] struct {
};

type Cons[a any] struct {
	A a;
	Aa List[a];
};

func Cons_dest[a any](p Cons[a])(a, List[a]) {
	return p.A, p.Aa;
}

type Option[a any] interface {};

type None[a any] struct {
};

type Some[a any] struct {
	A a;
};

func Some_dest[a any](p Some[a])(a) {
	return p.A;
}

func Hd2[a any] (x0 List[a]) Option[a] {
	{
		if (x0 == (List[a](Nil[a]{}))) {
			return (Option[a](None[a]{}));
		}
	};
	{
		q, m := x0.(Cons[a]);
		if (m) {
			_, c := Cons_dest(q);
			if (c == (List[a](Nil[a]{}))) {
				return (Option[a](None[a]{}));
			}
		}
	};
	{
		q, m := x0.(Cons[a]);
		if (m) {
			_, p := Cons_dest(q);
			q, m := p.(Cons[a]);
			if (m) {
				y, _ := Cons_dest(q);
				return (Option[a](Some[a]{y}));
			}
		}
	};
	panic("match failed");
}

type Semigroup[a any] struct {
	Plus func(a, a) a;
};

type Monoid[a any] struct {
	Semigroup_monoid Semigroup[a];
	Zero func() a;
};

func Plus_Nat (a Nat, x1 Nat) Nat {
	{
		if (x1 == (Nat(Zero{}))) {
			return a;
		}
	};
	{
		if (a == (Nat(Zero{}))) {
			aa := x1;
			return aa;
		}
	};
	{
		q, m := a.(Suc);
		if (m) {
			aa := Suc_dest(q);
			b := x1;
			return (Nat(Suc{Semigroup_Nat().Plus(aa, b)}));
		}
	};
	panic("match failed");
}

func Semigroup_Nat () Semigroup[Nat] {
	return Semigroup[Nat]{func (a Nat, b Nat) Nat { return Plus_Nat(a, b); }};
}

func Zero_Nat () Nat {
	return (Nat(Zero{}));
}

func Monoid_Nat () Monoid[Nat] {
	return Monoid[Nat]{Semigroup_Nat(), func () Nat { return Zero_Nat(); }};
}

func Fold[a, b any] (f func(a) func(b) b, x1 List[a], s b) b {
	{
		if (x1 == (List[a](Nil[a]{}))) {
			return s;
		}
	};
	{
		q, m := x1.(Cons[a]);
		if (m) {
			x, xs := Cons_dest(q);
			return Fold[a, b](f, xs, f(x)(s));
		}
	};
	panic("match failed");
}

func Sum[a any] (a_ Monoid[a], xs List[a]) a {
	return Fold[a, a](func (aa a) func(a) a { return func (b a) a { return a_.Semigroup_monoid.Plus(aa, b); }; }, xs, a_.Zero());
}
