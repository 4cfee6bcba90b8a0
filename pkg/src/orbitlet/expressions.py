"""Minimal arithmetic expression grammar for custom group charts.

Grammar: +, -, *, /, ^ (or **), exp, log, sin, cos, abs, numeric
literals, the constants pi and e, and block variables t1..td.
Expressions evaluate elementwise on numpy arrays.
"""

import ast

import numpy as np

from .errors import ConfigError

_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}

_CONSTS = {"pi": np.pi, "e": np.e}

_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.true_divide,
    ast.Pow: np.power,
}

_UNARY = {ast.UAdd: lambda x: x, ast.USub: np.negative}


def parse_expression(text, n_vars):
    """Compile an expression string into f(vars) -> array.

    ``vars`` is a sequence of arrays bound to t1..t<n_vars>.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {text!r}: {exc}") from None

    names = {f"t{i + 1}": i for i in range(n_vars)}

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise ConfigError(f"operator not allowed in {text!r}")
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY:
                raise ConfigError(f"operator not allowed in {text!r}")
            check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ConfigError(f"function not allowed in {text!r}")
            if len(node.args) != 1 or node.keywords:
                raise ConfigError(f"functions take one argument: {text!r}")
            check(node.args[0])
        elif isinstance(node, ast.Name):
            if node.id not in names and node.id not in _CONSTS:
                raise ConfigError(f"unknown name {node.id!r} in {text!r}")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise ConfigError(f"non-numeric literal in {text!r}")
        else:
            raise ConfigError(f"syntax not allowed in {text!r}")

    check(tree)

    def evaluate(node, env):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, env)
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](
                evaluate(node.left, env), evaluate(node.right, env)
            )
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](evaluate(node.operand, env))
        if isinstance(node, ast.Call):
            return _FUNCS[node.func.id](evaluate(node.args[0], env))
        if isinstance(node, ast.Name):
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            return env[names[node.id]]
        return node.value  # ast.Constant

    def fn(variables):
        if len(variables) != n_vars:
            raise ConfigError(f"expression expects {n_vars} variables")
        return evaluate(tree, list(variables))

    return fn
