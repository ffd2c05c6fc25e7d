package hd2

import (
	"testing"

	"fungo.test/harness/surface"
)

func nat(t surface.Term) Nat {
	if t.IsNil() {
		return nil
	}
	switch t.Head {
	case "Zero":
		return Nat(Zero{})
	case "Suc":
		return Nat(Suc{nat(t.Args[0])})
	}
	panic("not a Nat: " + t.Head)
}

func list[a any](t surface.Term, elem func(surface.Term) a) List[a] {
	if t.IsNil() {
		return nil
	}
	switch t.Head {
	case "Nil":
		return List[a](Nil[a]{})
	case "Cons":
		return List[a](Cons[a]{elem(t.Args[0]), list(t.Args[1], elem)})
	}
	panic("not a List: " + t.Head)
}

func showNat(n Nat) string {
	switch v := n.(type) {
	case Zero:
		return surface.Con("Zero")
	case Suc:
		return surface.Con("Suc", showNat(v.A))
	}
	panic("unexpected Nat value")
}

func showOption[a any](o Option[a], elem func(a) string) string {
	switch v := o.(type) {
	case None[a]:
		return surface.Con("None")
	case Some[a]:
		return surface.Con("Some", elem(v.A))
	}
	panic("unexpected Option value")
}

func TestVectors(t *testing.T) {
	surface.Replay(t, "../testdata/hd2.vectors.json", map[string]surface.Entry{
		"Hd2": func(args []surface.Term) string {
			return showOption(Hd2[Nat](list(args[0], nat)), showNat)
		},
	})
}
