import unittest

from reuse_synth.errors import ProblemError
from reuse_synth.interpreter import eval_expr, to_value
from reuse_synth.parser import parse_expression, split_knowledge
from reuse_synth.problems import PROBLEMS, BenchSpec, generate_problem
from reuse_synth.search import SearchConfig, SearchContext, build_examples


def load(spec):
    knowledge = split_knowledge(generate_problem(spec))
    context = SearchContext.build(knowledge, spec.config)
    return knowledge, context, build_examples(knowledge, context)


class test_generate_problem(unittest.TestCase):
    def test_every_problem_loads(self):
        for problem in PROBLEMS:
            with self.subTest(problem=problem):
                knowledge, context, examples = load(BenchSpec(problem))
                self.assertEqual([t.name for t in context.templates], ["comp", "map", "filter"])
                self.assertGreaterEqual(len(examples.positives), 1)

    def test_add_n_examples(self):
        knowledge, _, examples = load(BenchSpec("addN", n=5))
        self.assertEqual([b.name for b in knowledge.background], ["BK_add1"])
        for example_in, example_out in examples.positives:
            self.assertEqual(example_out.value, example_in.value + 5)
        for example_in, example_out in examples.negatives:
            self.assertNotEqual(example_out.value, example_in.value + 5)

    def test_maze_moves(self):
        _, context, examples = load(BenchSpec("maze", size=4))
        env = context.runtime_env
        self.assertEqual(eval_expr(env, parse_expression("BK_mRight([1, 0])")), to_value([2, 0]))
        self.assertEqual(eval_expr(env, parse_expression("BK_mRight([3, 0])")), to_value([3, 0]))
        self.assertEqual(eval_expr(env, parse_expression("BK_mDown([2, 0])")), to_value([2, 0]))
        self.assertEqual(examples.positives, ((to_value([0, 0]), to_value([3, 3])),))
        self.assertEqual(examples.negatives, ())

    def test_maze_blocked_cells(self):
        _, context, _ = load(BenchSpec("maze", size=4, blocked=frozenset({(1, 0), (2, 2)})))
        env = context.runtime_env
        self.assertEqual(eval_expr(env, parse_expression("BK_mRight([0, 0])")), to_value([0, 0]))
        self.assertEqual(eval_expr(env, parse_expression("BK_mUp([0, 0])")), to_value([0, 1]))
        self.assertEqual(eval_expr(env, parse_expression("BK_mUp([2, 1])")), to_value([2, 1]))
        with self.assertRaises(ProblemError):
            generate_problem(BenchSpec("maze", size=4, blocked=frozenset({(3, 3)})))

    def test_droplasts_noise(self):
        knowledge, context, _ = load(BenchSpec("droplasts", noise=3))
        self.assertEqual(
            [b.name for b in knowledge.background], ["BK_reverse", "BK_tail", "BK_id1", "BK_id2", "BK_id3"]
        )
        self.assertEqual(eval_expr(context.runtime_env, parse_expression("BK_reverse([1, 2, 3])")), to_value([3, 2, 1]))
        knowledge, _, _ = load(BenchSpec("droplasts-mixed"))
        self.assertEqual(len(knowledge.background), 6)

    def test_labels(self):
        self.assertEqual(BenchSpec("addN", n=6).label, "add6")
        self.assertEqual(BenchSpec("maze", size=8).label, "maze8x8")
        self.assertEqual(BenchSpec("droplasts", noise=2).label, "droplasts+2")

    def test_bad_specs(self):
        with self.assertRaises(ProblemError):
            generate_problem(BenchSpec("sorting"))
        with self.assertRaises(ProblemError):
            generate_problem(BenchSpec("maze", size=1))
        with self.assertRaises(ProblemError):
            generate_problem(BenchSpec("droplasts", noise=-1))
        with self.assertRaises(ProblemError):
            generate_problem(BenchSpec("addN", n=0))
        with self.assertRaises(ValueError):
            BenchSpec("addN", repeats=0, config=SearchConfig())


if __name__ == "__main__":
    unittest.main()
