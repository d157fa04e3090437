"""Generate forward-facing-step channel meshes with the Gmsh Python API.

Domain: [0, 3] x [0, 1] with the step occupying x >= 0.6, y <= 0.2.
Boundary physical groups: 1 = inflow (x = 0), 2 = outflow (x = 3), 3 = wall.
The element size is 1/inv_cl away from the step corner and is divided by
12.5 at the corner, blending back over a radius of 1/3.

usage: python3 tools/gen_step_mesh.py <inv_cl> <out.msh>
"""
import sys

import gmsh


def build(inv_cl: float, out: str) -> int:
    lc = 1.0 / inv_cl
    gmsh.initialize()
    gmsh.option.setNumber("General.Terminal", 0)
    gmsh.model.add("step")
    geo = gmsh.model.geo
    coords = [(0.0, 0.0), (0.6, 0.0), (0.6, 0.2), (3.0, 0.2), (3.0, 1.0), (0.0, 1.0)]
    pts = [geo.addPoint(x, y, 0.0, lc) for x, y in coords]
    lines = [geo.addLine(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]
    surf = geo.addPlaneSurface([geo.addCurveLoop(lines)])
    geo.synchronize()

    field = gmsh.model.mesh.field
    field.add("Distance", 1)
    field.setNumbers(1, "PointsList", [pts[2]])
    field.add("Threshold", 2)
    field.setNumber(2, "InField", 1)
    field.setNumber(2, "SizeMin", lc / 12.5)
    field.setNumber(2, "SizeMax", lc)
    field.setNumber(2, "DistMin", 0.0)
    field.setNumber(2, "DistMax", 1.0 / 3.0)
    field.setAsBackgroundMesh(2)
    gmsh.option.setNumber("Mesh.MeshSizeExtendFromBoundary", 0)
    gmsh.option.setNumber("Mesh.MeshSizeFromPoints", 0)

    gmsh.model.addPhysicalGroup(1, [lines[5]], 1)
    gmsh.model.addPhysicalGroup(1, [lines[3]], 2)
    gmsh.model.addPhysicalGroup(1, [lines[0], lines[1], lines[2], lines[4]], 3)
    gmsh.model.addPhysicalGroup(2, [surf], 10)
    gmsh.model.mesh.generate(2)
    gmsh.option.setNumber("Mesh.MshFileVersion", 2.2)
    gmsh.option.setNumber("Mesh.Binary", 0)
    gmsh.write(out)
    _, tags, _ = gmsh.model.mesh.getElements(2)
    count = sum(len(t) for t in tags)
    gmsh.finalize()
    return count


if __name__ == "__main__":
    print(build(float(sys.argv[1]), sys.argv[2]))
