import json
import os

from .errors import FanFormatError
from .exact import is_primitive
from .polyhedral import Fan

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "fixtures")


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise FanFormatError("file not found", location=path) from None
    except json.JSONDecodeError as exc:
        raise FanFormatError(exc.msg, location=f"line {exc.lineno} column {exc.colno}") from None


def _int(value, location):
    if isinstance(value, bool) or not isinstance(value, int):
        raise FanFormatError(f"expected an integer, got {value!r}", location=location)
    return value


def parse_fan(data):
    """Validate the {lattice_rank, rays, maximal_cones} schema and build the fan as written.

    Rays keep their file order and indices. Geometric problems (non-extremal
    generators, unused rays, overlaps) are left to `Fan.check`.
    """
    if not isinstance(data, dict):
        raise FanFormatError("expected a JSON object", location="$")
    for key in ("lattice_rank", "rays", "maximal_cones"):
        if key not in data:
            raise FanFormatError(f"missing key {key!r}", location="$")
    rank = _int(data["lattice_rank"], "lattice_rank")
    if rank < 0:
        raise FanFormatError("lattice rank must be nonnegative", location="lattice_rank")
    rays = data["rays"]
    if not isinstance(rays, list):
        raise FanFormatError("expected a list", location="rays")
    parsed = []
    for i, ray in enumerate(rays):
        if not isinstance(ray, list) or len(ray) != rank:
            raise FanFormatError(f"expected a list of {rank} integers", location=f"rays[{i}]")
        vec = tuple(_int(x, f"rays[{i}][{j}]") for j, x in enumerate(ray))
        if not any(vec):
            raise FanFormatError("zero ray", location=f"rays[{i}]")
        if not is_primitive(vec):
            raise FanFormatError(f"ray {list(vec)} is not primitive", location=f"rays[{i}]")
        if vec in parsed:
            raise FanFormatError(f"duplicate of rays[{parsed.index(vec)}]", location=f"rays[{i}]")
        parsed.append(vec)
    cones = data["maximal_cones"]
    if not isinstance(cones, list):
        raise FanFormatError("expected a list", location="maximal_cones")
    maximal = []
    for k, cone in enumerate(cones):
        if not isinstance(cone, list):
            raise FanFormatError("expected a list of ray indices", location=f"maximal_cones[{k}]")
        indices = set()
        for j, idx in enumerate(cone):
            idx = _int(idx, f"maximal_cones[{k}][{j}]")
            if not 0 <= idx < len(parsed):
                raise FanFormatError(f"ray index {idx} out of range", location=f"maximal_cones[{k}][{j}]")
            indices.add(idx)
        maximal.append(frozenset(indices))
    return Fan(rank, tuple(parsed), tuple(sorted(set(maximal), key=sorted)))


def load_fan(path):
    return parse_fan(load_json(path))


def save_fan(fan, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(fan.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def fixture_path(name):
    return os.path.join(FIXTURES_DIR, name)
