import itertools
import random
import unittest

from reuse_synth.errors import UnboundNameError
from reuse_synth.parser import parse_expression, parse_source, split_knowledge
from reuse_synth.problems import droplasts_text
from reuse_synth.search import SearchConfig, SearchContext
from reuse_synth.syntax import (
    Apply,
    Hole,
    InducedFunction,
    InducedProgram,
    Var,
    alpha_equivalent,
    apply_all,
    rename_vars,
)
from reuse_synth.typesystem import (
    BOOL,
    INT,
    FreshSource,
    Scope,
    TArrow,
    TList,
    TVar,
    TypeScheme,
    apply_type,
    arrow,
    generalize,
    infer_expr,
    infer_program,
    instantiate,
    normalize,
    primitive_schemes,
    unify,
)

a, b, c = TVar("a"), TVar("b"), TVar("c")


def types_up_to(depth, atoms=(a, b, INT)):
    out = list(atoms)
    for _ in range(depth - 1):
        grown = [TList(t) for t in out] + [TArrow(x, y) for x, y in itertools.product(out, repeat=2)]
        out += [t for t in dict.fromkeys(grown) if t not in out]
    return out


def candidate_unifiers():
    values = [INT, BOOL, a, b, TList(a), TList(INT), TArrow(a, INT), TArrow(TList(b), b)]
    return [{"a": x, "b": y} for x, y in itertools.product(values, repeat=2)]


def unification_pairs():
    shallow = types_up_to(2)
    deep = types_up_to(3)
    rng = random.Random(7)
    pairs = list(itertools.product(shallow, repeat=2))
    pairs += [(rng.choice(deep), rng.choice(deep)) for _ in range(1500)]
    # pairs that often unify: an instance of a type against the type itself
    for _ in range(500):
        t = rng.choice(deep)
        u = {"a": rng.choice(shallow), "b": rng.choice(shallow)}
        pairs.append((t, apply_type(u, t)))
    return pairs


def droplasts_env():
    knowledge = split_knowledge(parse_source(droplasts_text(0)))
    return SearchContext.build(knowledge, SearchConfig()).type_env


def comp(f, g):
    return apply_all(Var("comp"), f, g)


class test_unify(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(unify(a, INT), {"a": INT})
        self.assertEqual(unify(arrow(a, INT), arrow(BOOL, b)), {"a": BOOL, "b": INT})
        self.assertEqual(unify(a, a), {})
        self.assertIsNone(unify(INT, BOOL))
        self.assertIsNone(unify(TList(a), a))

    def test_most_general_unifier(self):
        unifiers = candidate_unifiers()
        for t1, t2 in unification_pairs():
            s = unify(t1, t2)
            solutions = [u for u in unifiers if apply_type(u, t1) == apply_type(u, t2)]
            if s is None:
                self.assertEqual(solutions, [], f"{t1} ~ {t2}")
                continue
            self.assertEqual(apply_type(s, t1), apply_type(s, t2), f"{t1} ~ {t2}")
            for v in (a, b):
                self.assertEqual(apply_type(s, apply_type(s, v)), apply_type(s, v))
            # every unifier is an instance of s
            for u in solutions:
                for v in (a, b):
                    self.assertEqual(apply_type(u, apply_type(s, v)), apply_type(u, v), f"{t1} ~ {t2} under {u}")


class test_schemes(unittest.TestCase):
    def test_generalize_and_instantiate(self):
        scheme = generalize({"x": a}, arrow(a, b))
        self.assertEqual(scheme, TypeScheme(frozenset({"b"}), arrow(a, b)))
        t = instantiate(scheme, FreshSource())
        self.assertEqual(t, arrow(a, TVar("t1")))

    def test_primitives(self):
        self.assertEqual(normalize(primitive_schemes()["append"].body), arrow(TList(a), TList(a), TList(a)))


class test_inference(unittest.TestCase):
    env = droplasts_env()

    def test_templates(self):
        self.assertEqual(normalize(self.env["map"].body), arrow(arrow(a, b), TList(a), TList(b)))
        self.assertEqual(normalize(self.env["filter"].body), arrow(arrow(a, BOOL), TList(a), TList(a)))
        self.assertEqual(normalize(self.env["BK_reverse"].body), arrow(TList(a), TList(a)))

    def test_map_hole(self):
        result = infer_expr(self.env, Apply(Var("map"), Hole(1)))
        self.assertEqual(normalize(arrow(result.hole_types[1], result.type)), arrow(arrow(a, b), TList(a), TList(b)))

    def test_comp_holes(self):
        result = infer_expr(self.env, comp(Hole(1), Hole(2)))
        self.assertEqual(
            normalize(arrow(result.hole_types[1], result.hole_types[2], result.type)),
            arrow(arrow(a, b), arrow(c, a), arrow(c, b)),
        )

    def test_hole_constrained_by_context(self):
        result = infer_expr(self.env, comp(Var("BK_reverse"), Hole(1)))
        self.assertEqual(normalize(result.hole_types[1]), arrow(a, TList(b)))

    def test_ill_typed(self):
        self.assertIsNone(infer_expr(primitive_schemes(), parse_expression("1 + true")))

    def test_unbound(self):
        with self.assertRaises(UnboundNameError):
            infer_expr(primitive_schemes(), Var("zz"))

    def test_droplasts_program(self):
        program = InducedProgram(
            (
                InducedFunction("target", comp(Var("g2"), Var("g3")), "comp"),
                InducedFunction("g2", Apply(Var("map"), Var("g3")), "map"),
                InducedFunction("g3", comp(Var("g4"), Var("BK_reverse")), "comp"),
                InducedFunction("g4", comp(Var("BK_reverse"), Var("BK_tail")), "comp"),
            )
        )
        out = infer_program(self.env, program)
        self.assertEqual(normalize(out["target"].body), arrow(TList(TList(a)), TList(TList(a))))

    def test_reuse_at_two_types(self):
        program = InducedProgram(
            (
                InducedFunction("target", comp(Var("g2"), Var("g3")), "comp"),
                InducedFunction("g2", Var("BK_reverse"), "identity"),
                InducedFunction("g3", Apply(Var("map"), Var("g2")), "map"),
            )
        )
        out = infer_program(self.env, program)
        self.assertEqual(normalize(out["target"].body), arrow(TList(TList(a)), TList(TList(a))))

    def test_untypable_program(self):
        program = InducedProgram((InducedFunction("target", comp(Var("BK_reverse"), Var("isUpper")), "comp"),))
        self.assertIsNone(infer_program(self.env, program))

    def test_stable_under_alpha_renaming(self):
        pairs = [
            ("lambda (x, y) x", "lambda (p, q) p"),
            ("lambda (xs) map (lambda (x) x + 1) xs", "lambda (ys) map (lambda (n) n + 1) ys"),
            ("lambda (f) lambda (x) f (f x)", "lambda (g) lambda (y) g (g y)"),
        ]
        for left, right in pairs:
            with self.subTest(expr=left):
                e1, e2 = parse_expression(left), parse_expression(right)
                self.assertTrue(alpha_equivalent(e1, e2))
                t1 = infer_expr(self.env, e1).type
                t2 = infer_expr(self.env, e2).type
                self.assertEqual(normalize(t1), normalize(t2))

    def test_stable_under_renaming_free_names(self):
        e = comp(Apply(Var("map"), Hole(1)), Var("BK_reverse"))
        renamed = rename_vars(e, {"BK_reverse": "BK_rev", "map": "each"})
        env = {**self.env, "BK_rev": self.env["BK_reverse"], "each": self.env["map"]}
        r1, r2 = infer_expr(self.env, e), infer_expr(env, renamed)
        self.assertEqual(normalize(arrow(r1.hole_types[1], r1.type)), normalize(arrow(r2.hole_types[1], r2.type)))

    def test_program_over_a_scope(self):
        program = InducedProgram(
            (
                InducedFunction("target", comp(Var("g2"), Var("g3")), "comp"),
                InducedFunction("g2", Var("BK_reverse"), "identity"),
                InducedFunction("g3", Apply(Var("map"), Var("g2")), "map"),
            )
        )
        from_dict = infer_program(self.env, program)
        from_scope = infer_program(Scope.of(self.env), program)
        for name in ("target", "g2", "g3"):
            self.assertEqual(normalize(from_scope[name].body), normalize(from_dict[name].body))


class test_scope(unittest.TestCase):
    def setUp(self):
        self.env = {
            **primitive_schemes(),
            "g2": arrow(a, b),
            "g3": TypeScheme(frozenset({"a"}), arrow(a, c)),
        }

    def test_split(self):
        scope = Scope.of(self.env)
        self.assertIn("head", scope.closed)
        self.assertEqual(set(scope.local), {"g2", "g3"})
        self.assertEqual(scope.free_vars(), {"a", "b", "c"})
        self.assertIn("head", scope)
        self.assertEqual(scope["g2"], arrow(a, b))
        self.assertIs(Scope.of(scope), scope)

    def test_substitution_skips_closed_schemes(self):
        scope = Scope.of(self.env)
        moved = scope.substituted({"a": INT, "c": BOOL})
        self.assertIs(moved.closed, scope.closed)
        self.assertEqual(moved["g2"], arrow(INT, b))
        self.assertEqual(moved["g3"], TypeScheme(frozenset({"a"}), arrow(a, BOOL)))
        closed_only = Scope.of(primitive_schemes())
        self.assertIs(closed_only.substituted({"a": INT}), closed_only)

    def test_generalize_over_local_bindings(self):
        scope = Scope.of(self.env).bind({"x": TVar("d")})
        scheme = generalize(scope, arrow(TVar("d"), TVar("e")))
        self.assertEqual(scheme.quantified, frozenset({"e"}))
        self.assertEqual(generalize(Scope.of(primitive_schemes()), arrow(a, b)).quantified, frozenset({"a", "b"}))


if __name__ == "__main__":
    unittest.main()
