import os
import unittest

from reuse_synth.errors import LoadError
from reuse_synth.interpreter import (
    Budget,
    EvalFailure,
    VInt,
    define,
    eval_application,
    eval_expr,
    load_program,
    primitive_environment,
    to_value,
)
from reuse_synth.parser import parse_expression, read_source_file, split_knowledge
from reuse_synth.search import SearchConfig, SearchContext
from reuse_synth.syntax import Apply, InducedFunction, InducedProgram, Lambda, RecDef, Var, apply_all

data_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def comp(f, g):
    return apply_all(Var("comp"), f, g)


class test_interpreter(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        knowledge = split_knowledge(read_source_file(os.path.join(data_dir, "add8.test")))
        cls.env = SearchContext.build(knowledge, SearchConfig()).runtime_env

    def test_map_add_one(self):
        result = eval_expr(self.env, parse_expression("map(BK_addOne)([1, 2, 3])"))
        self.assertEqual(result, to_value([2, 3, 4]))

    def test_filter(self):
        result = eval_expr(self.env, parse_expression("filter(lambda (x) x < 3)([4, 1, 5, 2])"))
        self.assertEqual(result, to_value([1, 2]))

    def test_add8_program(self):
        program = InducedProgram(
            (
                InducedFunction("target", comp(Var("g2"), Var("g2")), "comp"),
                InducedFunction("g2", comp(Var("g3"), Var("g3")), "comp"),
                InducedFunction("g3", comp(Var("BK_addOne"), Var("BK_addOne")), "comp"),
            )
        )
        runtime = load_program(self.env, program)
        self.assertEqual(eval_application(runtime["target"], VInt(1)), VInt(9))
        self.assertNotIn("target", self.env)

    def test_name_collision(self):
        program = InducedProgram((InducedFunction("target", Var("BK_addOne"), "identity"),))
        with self.assertRaises(LoadError):
            load_program({**self.env, "target": VInt(0)}, program)

    def test_failures_are_values(self):
        env = primitive_environment()
        self.assertIsInstance(eval_expr(env, parse_expression("head(nil)")), EvalFailure)
        self.assertIsInstance(eval_expr(env, parse_expression("1 + 'a'")), EvalFailure)
        self.assertIsInstance(eval_expr(env, parse_expression("unknown(1)")), EvalFailure)
        self.assertIsInstance(eval_expr(env, parse_expression("(lambda (x) x) = (lambda (y) y)")), EvalFailure)

    def test_budget(self):
        env = primitive_environment()
        define(env, RecDef("loop", Lambda(("x",), Apply(Var("loop"), Var("x")))))
        result = eval_application(env["loop"], VInt(0), Budget(10))
        self.assertIsInstance(result, EvalFailure)
        self.assertIn("budget", result.reason)

    def test_append_and_chars(self):
        env = primitive_environment()
        self.assertEqual(eval_expr(env, parse_expression("append([1], [2, 3])")), to_value([1, 2, 3]))
        self.assertEqual(eval_expr(env, parse_expression("isUpper('Q')")), to_value(True))


if __name__ == "__main__":
    unittest.main()
