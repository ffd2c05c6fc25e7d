// Package surface reads the test vectors exported by the compiler and
// replays them against generated packages.
package surface

import (
	"encoding/json"
	"fmt"
	"math/big"
	"os"
	"strings"
	"testing"
	"unicode"
)

// Term is a ground argument: a constructor application, an integer, a
// string, or the nil marker.
type Term struct {
	Head string
	Args []Term
	Int  *big.Int
	Str  *string
}

func (t Term) IsNil() bool { return t.Head == "nil" && t.Int == nil && t.Str == nil }

type Vector struct {
	Entry         string   `json:"entry"`
	Args          []string `json:"args"`
	Expected      *string  `json:"expected,omitempty"`
	ExpectedPanic bool     `json:"expectedPanic,omitempty"`
}

func Load(path string) ([]Vector, error) {
	data, err := os.ReadFile(path)
	if err != nil {
		return nil, err
	}
	var vs []Vector
	if err := json.Unmarshal(data, &vs); err != nil {
		return nil, fmt.Errorf("%s: %w", path, err)
	}
	return vs, nil
}

type parser struct {
	src string
	pos int
}

func Parse(src string) (Term, error) {
	p := &parser{src: src}
	t, err := p.app()
	if err != nil {
		return Term{}, err
	}
	p.skip()
	if p.pos != len(p.src) {
		return Term{}, fmt.Errorf("trailing input at %d in %q", p.pos, src)
	}
	return t, nil
}

func (p *parser) skip() {
	for p.pos < len(p.src) && unicode.IsSpace(rune(p.src[p.pos])) {
		p.pos++
	}
}

func (p *parser) app() (Term, error) {
	head, err := p.atom()
	if err != nil {
		return Term{}, err
	}
	for {
		p.skip()
		if p.pos == len(p.src) || p.src[p.pos] == ')' {
			return head, nil
		}
		arg, err := p.atom()
		if err != nil {
			return Term{}, err
		}
		if head.Int != nil || head.Str != nil {
			return Term{}, fmt.Errorf("literal applied to arguments in %q", p.src)
		}
		head.Args = append(head.Args, arg)
	}
}

func isDigit(c byte) bool { return c >= '0' && c <= '9' }

func (p *parser) atom() (Term, error) {
	p.skip()
	if p.pos == len(p.src) {
		return Term{}, fmt.Errorf("unexpected end of %q", p.src)
	}
	c := p.src[p.pos]
	switch {
	case c == '(':
		p.pos++
		t, err := p.app()
		if err != nil {
			return Term{}, err
		}
		p.skip()
		if p.pos == len(p.src) || p.src[p.pos] != ')' {
			return Term{}, fmt.Errorf("missing ) in %q", p.src)
		}
		p.pos++
		return t, nil
	case c == '"':
		start := p.pos
		p.pos++
		for p.pos < len(p.src) && p.src[p.pos] != '"' {
			if p.src[p.pos] == '\\' {
				p.pos++
			}
			p.pos++
		}
		if p.pos >= len(p.src) {
			return Term{}, fmt.Errorf("unterminated string in %q", p.src)
		}
		p.pos++
		var s string
		if err := json.Unmarshal([]byte(p.src[start:p.pos]), &s); err != nil {
			return Term{}, err
		}
		return Term{Str: &s}, nil
	case isDigit(c) || (c == '-' && p.pos+1 < len(p.src) && isDigit(p.src[p.pos+1])):
		start := p.pos
		p.pos++
		for p.pos < len(p.src) && isDigit(p.src[p.pos]) {
			p.pos++
		}
		n, _ := new(big.Int).SetString(p.src[start:p.pos], 10)
		return Term{Int: n}, nil
	default:
		start := p.pos
		for p.pos < len(p.src) {
			r := rune(p.src[p.pos])
			if !(unicode.IsLetter(r) || unicode.IsDigit(r) || r == '_' || r == '\'') {
				break
			}
			p.pos++
		}
		if p.pos == start {
			return Term{}, fmt.Errorf("unexpected %q in %q", c, p.src)
		}
		return Term{Head: p.src[start:p.pos]}, nil
	}
}

// Con renders a constructor value the way the vectors record it.
func Con(name string, args ...string) string {
	if len(args) == 0 {
		return name
	}
	return name + "(" + strings.Join(args, ", ") + ")"
}

func Str(s string) string {
	b, _ := json.Marshal(s)
	return string(b)
}

func Bool(b bool) string {
	if b {
		return "True"
	}
	return "False"
}

// Entry decodes the arguments of one call, runs it and renders the result.
type Entry func(args []Term) string

func call(e Entry, args []Term) (out string, panicked interface{}) {
	defer func() { panicked = recover() }()
	return e(args), nil
}

// Replay runs every vector in path against entries.
func Replay(t *testing.T, path string, entries map[string]Entry) {
	t.Helper()
	vs, err := Load(path)
	if err != nil {
		t.Fatal(err)
	}
	if len(vs) == 0 {
		t.Fatalf("%s has no vectors", path)
	}
	for i, v := range vs {
		e, ok := entries[v.Entry]
		if !ok {
			t.Errorf("vector %d: no entry %s", i, v.Entry)
			continue
		}
		args := make([]Term, len(v.Args))
		for j, a := range v.Args {
			if args[j], err = Parse(a); err != nil {
				t.Fatalf("vector %d: %v", i, err)
			}
		}
		out, p := call(e, args)
		switch {
		case v.ExpectedPanic:
			if p != "match failed" {
				t.Errorf("%s %v: want panic \"match failed\", got %q (panic %v)", v.Entry, v.Args, out, p)
			}
		case p != nil:
			t.Errorf("%s %v: unexpected panic %v", v.Entry, v.Args, p)
		case v.Expected == nil || out != *v.Expected:
			t.Errorf("%s %v: got %s, want %v", v.Entry, v.Args, out, v.Expected)
		}
	}
}
