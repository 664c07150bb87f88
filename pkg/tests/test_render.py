"""
Tests for SVG glyph rendering.
"""

import pytest
from lxml import etree

from spectral_tensor.anisotropy import hilbert_anisotropy
from spectral_tensor.bench import cigar_pair
from spectral_tensor.render import render_crossing_means, render_svg, svg_ns
from spectral_tensor.tensor import DiffusionTensor, TensorField


def parse(document):
    return etree.fromstring(document.encode("utf-8"))


class TestRenderSvg:
    """Test glyph documents."""

    def test_identity_is_a_circle(self):
        """Test that an isotropic tensor is drawn as one circle."""
        root = parse(render_svg([DiffusionTensor.identity()]))

        assert len(root.findall(".//" + svg_ns("circle"))) == 1
        assert root.findall(".//" + svg_ns("ellipse")) == []

    def test_one_ellipse_per_anisotropic_tensor(self):
        """Test the glyph count for a row of tensors."""
        s1, s2 = cigar_pair(60.0)
        root = parse(render_svg([s1, s2, s1]))

        assert len(root.findall(".//" + svg_ns("ellipse"))) == 3
        assert root.get("width") == "180"

    def test_deterministic(self, anisotropic):
        """Test that rendering twice gives the same document."""
        assert render_svg([anisotropic, anisotropic]) == render_svg([anisotropic, anisotropic])

    def test_metadata(self, anisotropic):
        """Test that the colour scale is recorded in the document."""
        root = parse(render_svg([anisotropic], coloring="FA", title="one tensor"))

        assert root.find(svg_ns("title")).text == "one tensor"
        assert "fill: FA" in root.find(svg_ns("desc")).text

    def test_field_slice(self, anisotropic, tmp_path):
        """Test that a field slice is drawn as a grid and written to disk."""
        field = TensorField.constant((3, 2, 2), anisotropic)
        path = tmp_path / "field.svg"
        document = render_svg(field, path=path, slice_index=1)

        assert path.read_text(encoding="utf-8") == document
        assert len(parse(document).findall(".//" + svg_ns("ellipse"))) == 6

    def test_slice_out_of_range(self, anisotropic):
        """Test slice validation."""
        with pytest.raises(ValueError):
            render_svg(TensorField.constant((1, 1, 1), anisotropic), slice_index=1)

    def test_unsupported_coloring(self, anisotropic):
        """Test that only HA and FA colourings are accepted."""
        with pytest.raises(ValueError):
            render_svg([anisotropic], coloring="GA")

    def test_empty(self):
        """Test that an empty input is refused."""
        with pytest.raises(ValueError):
            render_svg([])


class TestRenderCrossingMeans:
    """Test the crossed-cigar rendering."""

    def test_writes_both_documents(self, tmp_path):
        """Test that both frameworks are rendered and the means returned."""
        sq_path, le_path = tmp_path / "fig1-sq.svg", tmp_path / "fig1-le.svg"
        s1, s2 = cigar_pair(60.0)

        sq_mean, le_mean = render_crossing_means(sq_path, le_path, s1, s2)

        assert sq_path.exists() and le_path.exists()
        assert len(parse(sq_path.read_text()).findall(".//" + svg_ns("ellipse"))) == 3
        assert hilbert_anisotropy(le_mean.eigenvalues()) < hilbert_anisotropy(
            sq_mean.eigenvalues()
        )
