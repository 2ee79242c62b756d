"""Built-in models addressed by string IDs.

Grammar: ``name`` or ``name(arg, arg; arg ...)``. Arguments are numbers, JSON
arrays, or nested model IDs; ``,`` and ``;`` both separate arguments.

Single-slot fields (``make_field``)::

    harmonic(a)            a (|q|^2 + |p|^2)
    quartic(a)             a (|q|^2 + |p|^2)^2
    linear(b)              sum_i b_i q_i     (b: list, or scalars; one scalar broadcasts)
    exp_p(i)               exp(p_i)
    exp_halfAq(i; A)       exp(1/2 sum_j a_ij q_j)
    const(c), zero
    scale(c; H), sum(H1, H2, ...), prod(G, L)

Two-input fields (``make_two_input``)::

    pair_coupling          <x, y>
    separable(H1, H2)      H1(x) + H2(y)
    cross(G, L)            G(x) L(y)

Time-delay families (``make_family``): any single-slot ID (lifted as
autonomous), plus ``modulated(H; a_t, a_tau)`` and ``taumod(H; a_tau)``.
"""

import json

from . import symplectic as sp
from .errors import DimensionError, ModelSpecError


def _split_args(text):
    args, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ModelSpecError(f"unbalanced brackets in {text!r}")
        elif ch in ",;" and depth == 0:
            args.append(text[start:i].strip())
            start = i + 1
    if depth:
        raise ModelSpecError(f"unbalanced brackets in {text!r}")
    tail = text[start:].strip()
    if tail or args:
        args.append(tail)
    return args


def parse_model_id(model_id):
    """Split ``"name(a, b; c)"`` into ``("name", ["a", "b", "c"])``."""
    if not isinstance(model_id, str) or not model_id.strip():
        raise ModelSpecError(f"model ID must be a non-empty string, got {model_id!r}")
    s = model_id.strip()
    if "(" not in s:
        if not s.replace("_", "").isalnum():
            raise ModelSpecError(f"bad model ID {model_id!r}")
        return s, []
    if not s.endswith(")"):
        raise ModelSpecError(f"bad model ID {model_id!r}")
    name, inner = s[: s.index("(")].strip(), s[s.index("(") + 1 : -1]
    if not name:
        raise ModelSpecError(f"bad model ID {model_id!r}")
    return name, _split_args(inner)


def _number(arg):
    try:
        return float(arg)
    except ValueError:
        raise ModelSpecError(f"expected a number, got {arg!r}") from None


def _literal(arg):
    try:
        return json.loads(arg)
    except json.JSONDecodeError:
        raise ModelSpecError(f"expected a JSON literal, got {arg!r}") from None


def _index(arg):
    v = _number(arg)
    if v != int(v):
        raise ModelSpecError(f"expected an integer index, got {arg!r}")
    return int(v)


def _nargs(name, args, *allowed):
    if len(args) not in allowed:
        raise ModelSpecError(f"{name} takes {' or '.join(map(str, allowed))} argument(s), got {len(args)}")


def make_field(model_id, n):
    """Build a :class:`HamiltonianField` on R^{2n} from its ID."""
    dim = 2 * int(n)
    name, args = parse_model_id(model_id)
    try:
        if name == "harmonic":
            _nargs(name, args, 0, 1)
            return sp.harmonic(dim, _number(args[0]) if args else 1.0)
        if name == "quartic":
            _nargs(name, args, 0, 1)
            return sp.quartic(dim, _number(args[0]) if args else 1.0)
        if name == "linear":
            if len(args) == 1 and args[0].startswith("["):
                b = _literal(args[0])
            else:
                b = [_number(a) for a in args]
            if len(b) not in (1, n):
                raise ModelSpecError(f"linear needs 1 or {n} coefficients, got {len(b)}")
            return sp.linear_q(dim, b)
        if name == "exp_p":
            _nargs(name, args, 1)
            return sp.exp_p(dim, _index(args[0]))
        if name == "exp_halfAq":
            _nargs(name, args, 2)
            return sp.exp_half_aq(dim, _index(args[0]), _literal(args[1]))
        if name == "const":
            _nargs(name, args, 1)
            return sp.constant_field(dim, _number(args[0]))
        if name == "zero":
            _nargs(name, args, 0)
            return sp.constant_field(dim, 0.0)
        if name == "scale":
            _nargs(name, args, 2)
            return sp.scaled(_number(args[0]), make_field(args[1], n))
        if name == "sum":
            if not args:
                raise ModelSpecError("sum needs at least one field")
            return sp.field_sum(*(make_field(a, n) for a in args))
        if name == "prod":
            _nargs(name, args, 2)
            return sp.field_product(make_field(args[0], n), make_field(args[1], n))
    except DimensionError as exc:
        raise ModelSpecError(f"{model_id}: {exc}") from None
    raise ModelSpecError(f"unknown field model {name!r}")


def make_two_input(model_id, n):
    dim = 2 * int(n)
    name, args = parse_model_id(model_id)
    if name == "pair_coupling":
        _nargs(name, args, 0)
        return sp.pair_coupling(dim)
    if name == "separable":
        _nargs(name, args, 2)
        return sp.separable(make_field(args[0], n), make_field(args[1], n))
    if name == "cross":
        _nargs(name, args, 2)
        return sp.cross_product(make_field(args[0], n), make_field(args[1], n))
    raise ModelSpecError(f"unknown two-input model {name!r}")


def make_family(model_id, n):
    name, args = parse_model_id(model_id)
    if name == "modulated":
        _nargs(name, args, 2, 3)
        a_tau = _number(args[2]) if len(args) == 3 else 0.0
        return sp.modulated_family(make_field(args[0], n), _number(args[1]), a_tau)
    if name == "taumod":
        _nargs(name, args, 2)
        return sp.tau_modulated_family(make_field(args[0], n), _number(args[1]))
    return sp.autonomous_family(make_field(model_id, n))


def is_known(model_id, n=1):
    for maker in (make_field, make_two_input, make_family):
        try:
            maker(model_id, n)
            return True
        except ModelSpecError:
            continue
    return False
