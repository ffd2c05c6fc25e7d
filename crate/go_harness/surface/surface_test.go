package surface

import "testing"

func TestParse(t *testing.T) {
	tm, err := Parse(`Cons (-7) (Cons "a\"b" nil)`)
	if err != nil {
		t.Fatal(err)
	}
	if tm.Head != "Cons" || len(tm.Args) != 2 || tm.Args[0].Int.Int64() != -7 {
		t.Fatalf("%+v", tm)
	}
	inner := tm.Args[1]
	if *inner.Args[0].Str != `a"b` || !inner.Args[1].IsNil() {
		t.Fatalf("%+v", inner)
	}
	for _, bad := range []string{"", "(Cons", "1 2", `"open`, "Cons )"} {
		if _, err := Parse(bad); err == nil {
			t.Errorf("%q parsed", bad)
		}
	}
}

func TestRender(t *testing.T) {
	if got := Con("Some", Con("Suc", Con("Zero"))); got != "Some(Suc(Zero))" {
		t.Fatal(got)
	}
	if got := Str("a\"b"); got != `"a\"b"` {
		t.Fatal(got)
	}
}
