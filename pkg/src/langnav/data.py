"""Access to bundled data: scenes, program fixtures, records, corpora, prompts."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_root() -> Path:
    return Path(str(resources.files("langnav").joinpath("data")))


def scene_path(name: str) -> Path:
    """Path for a bundled scene name or a scene file path."""
    direct = Path(name)
    if direct.exists() and direct.suffix == ".json":
        return direct
    candidate = data_root() / "scenes" / f"{name}.json"
    if candidate.exists():
        return candidate
    raise FileNotFoundError(f"no scene file or bundled scene named {name!r}")


def fixture_dir() -> Path:
    return data_root() / "fixtures"


def records_path(name: str) -> Path:
    mapping = {
        "appendix-records": "appendix_stage_records.json",
        "classroom-records": "classroom_ab_records.json",
    }
    direct = Path(name)
    if direct.exists():
        return direct
    if name in mapping:
        return data_root() / "records" / mapping[name]
    raise FileNotFoundError(f"no records file or bundled records named {name!r}")


def corpus_path(name: str) -> Path:
    mapping = {"sim": "sim_corpus.json", "crossframe": "crossframe_corpus.json"}
    direct = Path(name)
    if direct.exists():
        return direct
    if name in mapping:
        return data_root() / "corpus" / mapping[name]
    raise FileNotFoundError(f"no corpus file or bundled corpus named {name!r}")


def prompt_template_path() -> Path:
    return data_root() / "prompts" / "nav_api_prompt.txt"
