"""Symbolic world model driven by LLM-suggested world-state transformations.

Worlds, plans and parsed replies are plain dicts; session logs are JSON Lines text.
"""

import json

from . import _core
from ._core import StoryworldError

__all__ = [
    "StoryworldError",
    "Session",
    "annotate",
    "build_prompt",
    "emit_response",
    "execute_plan",
    "load_scenario",
    "parse_response",
    "render_world",
    "replay_log",
    "report",
    "scenario_ids",
    "system_prompt",
    "validate_scenario",
    "world_violations",
]


def error_code(exc):
    """The machine-readable code of a StoryworldError."""
    return exc.args[0] if exc.args else None


def scenario_ids():
    return list(_core.scenario_ids())


def load_scenario(scenario_id):
    """The bundled scenario document, including its world."""
    return json.loads(_core.scenario_json(scenario_id))


def validate_scenario(document):
    text = document if isinstance(document, str) else json.dumps(document)
    return [{"code": c, "message": m} for c, m in _core.validate_scenario(text)]


def _world_text(world):
    if isinstance(world, str):
        return world
    # Accept a whole scenario document as well as a bare world.
    return json.dumps(world)


def render_world(world, locale="en"):
    return _core.render_world(_world_text(world), locale)


def system_prompt(locale="en"):
    return _core.system_prompt(locale)


def build_prompt(rendered_state, player_input, locale="en"):
    system_msg, user_msg = _core.build_prompt(rendered_state, player_input, locale)
    return {"system_msg": system_msg, "user_msg": user_msg}


def parse_response(raw):
    """Returns the parsed reply, or raises ValueError when nothing could be extracted."""
    parsed, error = _core.parse_response(raw)
    if error:
        raise ValueError(error)
    return json.loads(parsed)


def emit_response(parsed):
    return _core.emit_response(json.dumps(parsed))


def execute_plan(world, plan, strict_puzzles=False, player_input=""):
    """Applies {"moves": [{"item", "destination"}], "unblocks": [...], "move_player": ...}."""
    return json.loads(_core.execute_plan(_world_text(world), json.dumps(plan), strict_puzzles, player_input))


def world_violations(world):
    return [{"code": c, "message": m} for c, m in _core.world_violations(_world_text(world))]


def replay_log(log_text):
    consistent, problems = _core.replay_log(log_text)
    return {"consistent": consistent, "problems": list(problems)}


def annotate(log_text, turn, category, note="", annotator=""):
    return _core.annotate(log_text, turn, category, note, annotator)


def report(log_texts, format="text"):
    return _core.report(list(log_texts), format)


class Session:
    """A play session. `backend` is a backend registry entry; by default a scripted
    backend built from `script` and `overrides`."""

    def __init__(self, scenario_id, locale="en", backend=None, script=(), overrides=None, tester="",
                 model_label="", turn_cap=50, strict_puzzles=False, scenario_dir=""):
        if backend is None:
            backend = {"kind": "scripted", "script": list(script), "overrides": dict(overrides or {})}
        self._s = _core.Session(scenario_id, locale, json.dumps(backend), tester, model_label, turn_cap,
                                strict_puzzles, str(scenario_dir))

    @property
    def id(self):
        return self._s.id

    @property
    def status(self):
        return self._s.status

    def play_turn(self, player_input):
        return json.loads(self._s.play_turn(player_input))

    def world(self):
        return json.loads(self._s.world())

    def render(self):
        return self._s.render()

    def transcript(self):
        return json.loads(self._s.transcript())

    def export_log(self):
        return self._s.export_log()
