package hd2

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
