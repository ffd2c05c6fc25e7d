package adapted

import (
	"math/big"
)

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

func Length[a any] (x0 List[a]) *big.Int {
	{
		if (x0 == (List[a](Nil[a]{}))) {
			return big.NewInt(0);
		}
	};
	{
		q, m := x0.(Cons[a]);
		if (m) {
			_, xs := Cons_dest(q);
			return new(big.Int).Add(big.NewInt(1), Length[a](xs));
		}
	};
	panic("match failed");
}

func Sum_ints (x0 List[*big.Int]) *big.Int {
	{
		if (x0 == (List[*big.Int](Nil[*big.Int]{}))) {
			return big.NewInt(0);
		}
	};
	{
		q, m := x0.(Cons[*big.Int]);
		if (m) {
			x, xs := Cons_dest(q);
			return new(big.Int).Add(x, Sum_ints(xs));
		}
	};
	panic("match failed");
}

func All_small (k *big.Int, x1 List[*big.Int]) bool {
	{
		if (x1 == (List[*big.Int](Nil[*big.Int]{}))) {
			return true;
		}
	};
	{
		q, m := x1.(Cons[*big.Int]);
		if (m) {
			x, xs := Cons_dest(q);
			s := (x.Cmp(k) < 0);
			{
				if (s == true) {
					return All_small(k, xs);
				}
			};
			{
				if (s == false) {
					return false;
				}
			};
			panic("match failed");
		}
	};
	panic("match failed");
}

func Join (x0 List[string]) string {
	{
		if (x0 == (List[string](Nil[string]{}))) {
			return "";
		}
	};
	{
		q, m := x0.(Cons[string]);
		if (m) {
			s, rest := Cons_dest(q);
			return (s + Join(rest));
		}
	};
	panic("match failed");
}

func A () *big.Int {
	return big.NewInt(10);
}
