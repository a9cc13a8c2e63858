"""Convert a topohub topology-zoo JSON file into Topology Zoo style GraphML."""
import json
import sys
from xml.sax.saxutils import escape, quoteattr


def main(src, dst):
    data = json.load(open(src))
    out = ['<?xml version="1.0" encoding="utf-8"?>',
           '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
           '  <key attr.name="label" attr.type="string" for="node" id="d0" />',
           '  <key attr.name="Longitude" attr.type="double" for="node" id="d1" />',
           '  <key attr.name="Latitude" attr.type="double" for="node" id="d2" />',
           '  <graph edgedefault="undirected">']
    for n in data["nodes"]:
        lon, lat = n["pos"]
        out.append(f'    <node id={quoteattr(str(n["id"]))}>')
        out.append(f'      <data key="d0">{escape(n["name"])}</data>')
        out.append(f'      <data key="d1">{lon}</data>')
        out.append(f'      <data key="d2">{lat}</data>')
        out.append('    </node>')
    for e in data["edges"]:
        out.append(f'    <edge source={quoteattr(str(e["source"]))} '
                   f'target={quoteattr(str(e["target"]))} />')
    out += ['  </graph>', '</graphml>', '']
    open(dst, "w").write("\n".join(out))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
