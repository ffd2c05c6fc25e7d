package sumint

import (
	"math/big"
	"testing"

	"fungo.test/harness/surface"
)

func integer(t surface.Term) *big.Int { return t.Int }

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
	surface.Replay(t, "../testdata/sumint.vectors.json", map[string]surface.Entry{
		"Sum": func(args []surface.Term) string {
			return Sum[*big.Int](Monoid_int(), list(args[0], integer)).String()
		},
	})
}
