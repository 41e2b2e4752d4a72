from __future__ import annotations

import sys
import threading
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"

# Canonical 4-level outline used across CLI/API/acceptance tests: 3 branches,
# every leaf has a sibling and more than 15 characters, total text under 1000.
SURREALISM_OUTLINE = """\
# Surrealism
## Origins
### Paris as a cultural hub
#### Writers and painters gathered in Paris cafes after the war.
#### The city's journals spread the movement across Europe.
### Revolution of the mind
#### Breton framed it as a revolution of the mind.
#### Dreams and automatism became creative tools.
## Major artists
### Salvador Dali
#### Dali painted dream scenes with exacting, photographic detail.
#### His melting clocks became the movement's signature image.
### Max Ernst
#### Ernst invented frottage, rubbing textures into his canvases.
#### His collage novels spliced engravings into dream stories.
## Impact
### Literature & Film
#### Its imagery migrated into experimental cinema of the era.
#### Novelists borrowed dream logic for narrative structure.
### Everyday culture
#### Advertising borrowed its jarring juxtapositions.
#### The word surreal entered everyday speech."""

DALI_EXPLANATION = (
    "# Dali was a Spanish painter who pioneered dreamlike imagery with"
    " obsessive precision. His double images trained viewers to distrust"
    " their own eyes."
)

ARTIST_EXAMPLES = """\
# Andre Breton wrote the Surrealist Manifesto, giving the group its charter.
# Magritte unsettled viewers by painting ordinary objects in impossible places.
# Leonora Carrington carried surrealist myth-making into the postwar years."""

ERNST_ANSWER = (
    "# Max Ernst was a German-born pioneer of collage and frottage who"
    " bridged Dada and Surrealism across Cologne and Paris."
)


@pytest.fixture
def surrealism_outline() -> str:
    return SURREALISM_OUTLINE


@pytest.fixture
def config():
    from nodemind.prompts import default_config

    return default_config()


def find_node(tree: dict, text: str) -> dict | None:
    """Locate a node record by exact text in a nested tree record."""
    if tree["text"] == text:
        return tree
    for child in tree["children"]:
        found = find_node(child, text)
        if found:
            return found
    return None


class LiveServer:
    """uvicorn in a daemon thread on an ephemeral port."""

    def __init__(self, app):
        import uvicorn

        self._config = uvicorn.Config(
            app, host="127.0.0.1", port=0, log_level="error"
        )
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self) -> str:
        self._thread.start()
        deadline = time.time() + 10
        while not self._server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc):
        self._server.should_exit = True
        self._thread.join(timeout=10)
