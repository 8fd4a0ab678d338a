import numpy as np
import pytest

from spinreversal.chimera import chimera, embed_complete
from spinreversal.plots import IDLE, KEPT, REVERSED, line_chart, render_layout


def test_line_chart(tmp_path):
    path = tmp_path / "c.svg"
    line_chart({"a": ([0, 1, 2], [1.0, -1.0, 0.5], [0.1, 0.2, 0.1]), "b": ([0, 2], [0, 0])}, path, "t", "x", "y")
    text = path.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 2


def test_layout_colors(tmp_path):
    topo = chimera(3)
    emb = embed_complete(5, topo)
    path = tmp_path / "l.svg"
    render_layout(topo, emb, np.zeros(len(emb.qubits), bool), path)
    text = path.read_text()
    assert f'fill="{REVERSED}"' not in text
    assert text.count(f'fill="{KEPT}"') == len(emb.qubits)
    assert text.count(f'fill="{IDLE}"') == 4 * 8 - len(emb.qubits)
    mask = np.zeros(len(emb.qubits), bool)
    mask[:3] = True
    render_layout(topo, emb, mask, path)
    assert path.read_text().count(f'fill="{REVERSED}"') == 3
    with pytest.raises(ValueError):
        render_layout(topo, emb, mask[:-1], path)
