"""Deterministic offline provider.

Synthesizes schema-shaped content from the structured context the
prompt layer attaches to each call, so the whole pipeline runs without
a network or a key. Output is a pure function of (seed, purpose, stage,
messages): the RNG is seeded from a hash of those, never from global
state, so the same session replays byte-identically.

``mode`` bends the output for failure-path testing:
  ok              valid content, varied presentation (prose, fences, aliases)
  prose           no JSON at all
  malformed       syntactically broken JSON, every attempt
  repairable      first attempt per stage is missing fields, retries are valid
  duplicate_names character batches with a duplicated name
  fail            raise ProviderError on every call
  fail:<stage>    raise ProviderError only for that stage
"""

from __future__ import annotations

import hashlib
import json
import random
from typing import Sequence

from ..canonical import canonical_json
from ..errors import ProviderError
from ..model import Stage
from .provider import ChatMessage, ProviderOptions

_FIRST_NAMES = (
    "Mira", "Anton", "Sana", "Teodor", "Long", "Ivy", "Baz", "Clara",
    "Odile", "Ren", "Petra", "Hugo", "Noor", "Savel", "Tamsin", "Iker",
)

_TRAITS = (
    "stubborn and quick to laugh",
    "careful, almost ceremonial",
    "restless, allergic to silence",
    "soft-spoken but immovable",
    "charming until contradicted",
    "blunt, loyal, easily bored",
)

_BACKGROUNDS = (
    "grew up above the family shop and never quite left it",
    "arrived in town two winters ago with one suitcase",
    "was once locally famous and still acts like it",
    "keeps a ledger of every favor owed and granted",
    "trained for a profession nobody needs anymore",
    "has buried three secrets and remembers where",
)

_REL_DESCRIPTIONS = (
    "old rivals who owe each other money",
    "siblings who disagree about everything but lunch",
    "former partners in a failed venture",
    "neighbors locked in a polite feud",
    "mentor and pupil, roles slowly reversing",
)

_PLOT_TITLES = (
    "The Unwelcome Letter", "A Debt Comes Due", "The Borrowed Key",
    "An Audience Refused", "The Broken Toast", "A Door Left Open",
    "The Last Rehearsal", "An Offer Withdrawn",
)

_PLOT_EVENTS = (
    "{a} confronts {b} about what was promised",
    "{a} discovers what {b} has been hiding",
    "{a} asks {b} for help and is refused",
    "{a} makes {b} an offer that cannot be taken back",
    "{a} tells {b} the truth at the worst possible moment",
)

_SETTINGS = (
    "the back room of the tailor shop",
    "a rain-soaked bus stop",
    "the Café Réal after closing",
    "a kitchen mid-renovation",
    "the rooftop garden",
    "an emptied-out archive",
)

_TIMES = ("day", "night", "late evening", "the next morning", "dusk")

_LINE_STEMS = (
    "You knew about {w} and said nothing.",
    "I came here to talk about {w}, nothing else.",
    "Say that again, slower.",
    "We both signed. That still means something.",
    "Not here. Not with {w} between us.",
    "Then tell me what you would have done.",
    "I counted on you. That was my mistake.",
    "Keep your voice down and sit.",
)

_NOTES = ("quietly", "after a pause", "without looking up", "almost smiling", "sharp")

_TUTOR_STEMS = (
    "What does {who} stand to lose if this goes wrong?",
    "Which part of this would surprise the audience least, and can you cut it?",
    "What would change if this happened one scene earlier?",
    "Who is pushing hardest here, and why now?",
    "What is the version of this that scares you a little to write?",
)


def _theme_word(text: str) -> str:
    tokens = [t.strip(".,;:!?\"'()").lower() for t in text.split()]
    tokens = [t for t in tokens if len(t) > 3]
    return max(tokens, key=len) if tokens else "the plan"


class MockProvider:
    name = "mock"

    def __init__(self, seed: int = 0, mode: str = "ok"):
        self.seed = seed
        self.mode = mode
        self._attempts: dict[str, int] = {}

    def complete(self, messages: Sequence[ChatMessage], options: ProviderOptions) -> str:
        stage = options.stage
        stage_key = stage.key if stage else "-"
        if self.mode == "fail" or self.mode == f"fail:{stage_key}":
            raise ProviderError("mock provider was told to fail", kind="transport")
        key = f"{options.purpose}|{stage_key}"
        attempt = self._attempts.get(key, 0)
        self._attempts[key] = attempt + 1
        rng = self._rng(options, stage_key, messages)
        if options.purpose == "tutor":
            return self._tutor_reply(rng, options)
        if stage is None or stage == Stage.LOGLINE:
            raise ProviderError("mock functional call without a generable stage", kind="transport")
        if self.mode == "prose":
            return "I would rather discuss this in prose. There is much to consider, and none of it is JSON."
        if self.mode == "malformed":
            return '```json\n{"' + stage.key + '": [{"broken": \n```'
        if self.mode == "repairable" and attempt == 0:
            return json.dumps({stage.key: [{"unexpected": "shape"}]})
        payload = self._payload(rng, stage, options.context_data)
        if self.mode == "duplicate_names" and stage == Stage.CHARACTERS and len(payload) > 1:
            payload[-1]["name"] = payload[0]["name"]
        return self._present(rng, stage, payload)

    def _rng(self, options: ProviderOptions, stage_key: str, messages: Sequence[ChatMessage]) -> random.Random:
        seed = self.seed if options.seed is None else options.seed
        ctx = canonical_json([m.to_dict() for m in messages])
        digest = hashlib.sha256(f"{seed}|{options.purpose}|{stage_key}|{ctx}".encode("utf-8")).digest()
        return random.Random(int.from_bytes(digest[:8], "big"))

    def _tutor_reply(self, rng: random.Random, options: ProviderOptions) -> str:
        who = "your protagonist"
        names = options.context_data.get("characters") or [
            p.get("name") for p in options.context_data.get("plots", []) if isinstance(p, dict)
        ]
        if isinstance(names, list) and names and isinstance(names[0], str):
            who = rng.choice(names)
        stem = rng.choice(_TUTOR_STEMS).format(who=who)
        opener = rng.choice(
            (
                "There is something worth pressing on here.",
                "You have more material than you are using.",
                "The safest choice on the page is rarely the best one.",
            )
        )
        return f"{opener} {stem}"

    def _payload(self, rng: random.Random, stage: Stage, context: dict) -> list[dict]:
        if stage == Stage.CHARACTERS:
            return self._characters(rng, context)
        if stage == Stage.PLOTS:
            return self._plots(rng, context)
        if stage == Stage.SCENES:
            return self._scenes(rng, context)
        return self._dialogues(rng, context)

    def _characters(self, rng: random.Random, context: dict) -> list[dict]:
        theme = _theme_word(context.get("logline", ""))
        names = rng.sample(_FIRST_NAMES, rng.randint(3, 5))
        out = []
        for i, name in enumerate(names):
            character = {
                "name": name,
                "personality": rng.choice(_TRAITS),
                "background": f"{rng.choice(_BACKGROUNDS)}; still carries {theme}",
                "relationships": [],
            }
            if i > 0 and rng.random() < 0.8:
                character["relationships"].append(
                    {"with": rng.choice(names[:i]), "description": rng.choice(_REL_DESCRIPTIONS)}
                )
            out.append(character)
        return out

    def _plots(self, rng: random.Random, context: dict) -> list[dict]:
        cast = context.get("characters") or list(_FIRST_NAMES[:3])
        count = rng.randint(3, min(5, len(_PLOT_TITLES)))
        titles = rng.sample(_PLOT_TITLES, count)
        out = []
        for i, title in enumerate(titles):
            pair = rng.sample(cast, min(2, len(cast)))
            a, b = pair[0], pair[-1]
            plot = {
                "title": title,
                "summary": _PLOT_EVENTS[rng.randrange(len(_PLOT_EVENTS))].format(a=a, b=b),
                "causes": [] if i == 0 else sorted(rng.sample(range(1, i + 1), rng.randint(1, min(2, i)))),
                "characters": sorted(set(pair)),
            }
            out.append(plot)
        return out

    def _scenes(self, rng: random.Random, context: dict) -> list[dict]:
        plots = context.get("plots") or []
        if not plots:
            return [
                {
                    "setting": rng.choice(_SETTINGS),
                    "time": rng.choice(_TIMES),
                    "plots": [1],
                    "participants": list(_FIRST_NAMES[:2]),
                }
            ]
        count = max(1, min(len(plots), rng.randint(2, 4)))
        chunks: list[list[dict]] = [[] for _ in range(count)]
        for i, plot in enumerate(plots):
            chunks[min(i * count // len(plots), count - 1)].append(plot)
        out = []
        for chunk in chunks:
            if not chunk:
                continue
            participants = sorted({name for plot in chunk for name in plot.get("characters", [])})
            out.append(
                {
                    "setting": rng.choice(_SETTINGS),
                    "time": rng.choice(_TIMES),
                    "plots": [plot["ordinal"] for plot in chunk],
                    "participants": participants,
                }
            )
        return out

    def _dialogues(self, rng: random.Random, context: dict) -> list[dict]:
        scenes = context.get("scenes") or []
        theme = _theme_word(" ".join(s.get("setting", "") for s in scenes))
        out = []
        for scene in scenes:
            participants = scene.get("participants") or ["Someone"]
            start = rng.randrange(len(participants))
            for i in range(rng.randint(2, 4)):
                speaker = participants[(start + i) % len(participants)]
                line: dict = {
                    "scene": scene.get("ordinal", 1),
                    "speaker": speaker,
                    "line": rng.choice(_LINE_STEMS).format(w=theme),
                }
                if rng.random() < 0.25:
                    line["note"] = rng.choice(_NOTES)
                out.append(line)
        return out

    _ALIASES = {
        Stage.CHARACTERS: ("cast", {"name": "character_name", "personality": "persona", "background": "bio"}),
        Stage.PLOTS: ("plot_points", {"summary": "description", "causes": "follows_from", "characters": "involved"}),
        Stage.SCENES: ("scenes", {"setting": "location", "plots": "plot_ordinals", "participants": "cast"}),
        Stage.DIALOGUES: ("lines", {"scene": "scene_number", "speaker": "character", "line": "text"}),
    }

    def _present(self, rng: random.Random, stage: Stage, payload: list[dict]) -> str:
        style = rng.choice(("fence", "prose_fence", "aliased_fence", "bare"))
        key = stage.key
        if style == "aliased_fence":
            key, field_map = self._ALIASES[stage]
            payload = [{field_map.get(k, k): v for k, v in el.items()} for el in payload]
        body = json.dumps({key: payload}, ensure_ascii=False, indent=2)
        if style == "fence":
            return f"```json\n{body}\n```"
        if style in ("prose_fence", "aliased_fence"):
            return (
                f"Here is a draft of the {stage.key} based on the confirmed material.\n\n"
                f"```json\n{body}\n```\n\nTell me what to adjust."
            )
        return f"Draft {stage.key} follow.\n{body}"
