package adapted

import (
	"math/big"
	"testing"

	"fungo.test/harness/surface"
)

func integer(t surface.Term) *big.Int { return t.Int }

func str(t surface.Term) string { return *t.Str }

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

func TestVectors(t *testing.T) {
	surface.Replay(t, "../testdata/adapted.vectors.json", map[string]surface.Entry{
		"Length": func(args []surface.Term) string {
			return Length[*big.Int](list(args[0], integer)).String()
		},
		"Sum_ints": func(args []surface.Term) string {
			return Sum_ints(list(args[0], integer)).String()
		},
		"All_small": func(args []surface.Term) string {
			return surface.Bool(All_small(integer(args[0]), list(args[1], integer)))
		},
		"Join": func(args []surface.Term) string {
			return surface.Str(Join(list(args[0], str)))
		},
		"A": func(args []surface.Term) string {
			return A().String()
		},
	})
}
