"""Regenerate the replay fixture set from samples.py.

Run after any change to the shipped prompt, ontology or exemplar:

    python tests/fixtures/replay10/build_fixtures.py
"""

import json
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from samples import SAMPLES  # noqa: E402

from hrex.dataset import SentenceSample, dumps_sample  # noqa: E402
from hrex.facts import HyperFact  # noqa: E402
from hrex.gateway import DEFAULT_MODEL, cache_key, write_entry  # noqa: E402
from hrex.ontology import default_ontology  # noqa: E402
from hrex.prompts import build_prompt_spec, default_exemplar, render  # noqa: E402

MODEL = DEFAULT_MODEL
TEMPERATURE = 0.0


def main() -> None:
    spec = build_prompt_spec(default_ontology(), default_exemplar())
    responses = HERE / "responses"
    for old in responses.glob("*.json"):
        old.unlink()
    with open(HERE / "gold.jsonl", "w", encoding="utf-8", newline="\n") as gold:
        for s in SAMPLES:
            facts = tuple(HyperFact.build(h, r, t, q) for h, r, t, q in s["facts"])
            gold.write(dumps_sample(SentenceSample(s["id"], s["text"], facts)) + "\n")
            prompt = render(spec, s["text"])
            for run_index, text in enumerate(s["runs"]):
                key = cache_key(MODEL, TEMPERATURE, prompt.prompt_hash, run_index)
                write_entry(responses / f"{key}.json",
                            {"raw_text": text, "model": MODEL, "recorded_at": "fixture", "sample_id": s["id"],
                             "run_index": run_index})
    print(f"wrote {len(SAMPLES)} samples, {len(list(responses.glob('*.json')))} responses")


if __name__ == "__main__":
    main()
