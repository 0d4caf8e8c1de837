"""Byte-for-byte raster regressions against committed reference images."""

import os

import numpy as np

from charsurf import dynamics, surfaces

HERE = os.path.dirname(__file__)


def golden(name):
    return open(os.path.join(HERE, "golden", name), "rb").read()


def rendered_bytes(raster, tmp_path, name):
    path = os.path.join(tmp_path, name)
    dynamics.write_pgm(raster, path)
    return open(path, "rb").read(), open(path + ".json", "rb").read()


def test_complex_slice_raster_is_reproduced_exactly(tmp_path):
    r = dynamics.render_complex_slice(surfaces.pt_params(4.0), "xyz", 0.3 + 0.2j,
                                      window=((-2.0, 2.0), (-2.0, 2.0)),
                                      grid=64, budget=60, radius=1e4)
    pgm, meta = rendered_bytes(r, tmp_path, "slice.pgm")
    assert pgm == golden("slice_pt4_xyz_64.pgm")
    assert meta == golden("slice_pt4_xyz_64.pgm.json")
    # the image shows all three pixel classes
    assert {-2, -1}.issubset(set(np.unique(r.values).tolist()))
    assert (r.values >= 0).any()


def test_real_chart_raster_is_reproduced_exactly(tmp_path):
    r = dynamics.render_real_chart(surfaces.pt_params(2.0), "xyz",
                                   window=((-6.0, 6.0), (-6.0, 6.0)),
                                   grid=64, budget=60, radius=1e3)
    pgm, meta = rendered_bytes(r, tmp_path, "real.pgm")
    assert pgm == golden("real_pt2_xyz_64.pgm")
    assert meta == golden("real_pt2_xyz_64.pgm.json")
    assert {-2, -1}.issubset(set(np.unique(r.values).tolist()))
    assert (r.values >= 0).any()
