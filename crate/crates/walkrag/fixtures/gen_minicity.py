#!/usr/bin/env python3
"""Generate the synthetic mini-city fixture used by the tests.

Writes map.osm, gazetteer.csv, air_quality.json, corpus.jsonl, eval.jsonl,
walkrag.toml and manifest.json into fixtures/minicity/. The manifest counts
are computed here from the generated entities with their own implementation
of the walkable-way and feature-kind rules, independently of the Rust code.

Re-running is deterministic.
"""

import json
import math
import os
import random
from xml.sax.saxutils import quoteattr

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "minicity")

LAT0, DLAT, ROWS = 48.842, 0.0015, 18
LON0, DLON, COLS = 2.286, 0.0022, 38

ROW_NAMES = [
    "Rue de la Paix", "Rue du Bac", "Rue de Rennes", "Rue de Vaugirard", "Rue Jacob",
    "Rue de Grenelle", "Rue de Varenne", "Rue de Lille", "Rue de l'Universite", "Rue Cler",
    "Rue de Rivoli", "Rue Saint-Honore", "Rue des Archives", "Rue du Temple", "Rue Oberkampf",
    "Rue de Turenne", "Rue Vieille du Temple", "Rue de Sevres",
]
SAINTS = [
    "Antoine", "Benoit", "Claude", "Denis", "Etienne", "Fiacre", "Germain", "Hilaire", "Irenee",
    "Jacques", "Louis", "Marcel", "Nicolas", "Ouen", "Paul", "Quentin", "Roch", "Sulpice",
    "Thomas", "Victor", "Ambroise", "Bernard", "Cyr", "Dominique", "Eloi", "Florentin",
    "Gilles", "Honore", "Isidore", "Julien", "Lazare", "Martin", "Norbert", "Ode", "Pierre",
    "Remi", "Simon", "Yves",
]
COL_NAMES = [f"Rue Saint-{s}" for s in SAINTS]

# (name, lat, lon, category, passage text)
PLACES = [
    ("Notre Dame", 48.8530, 2.3499, "attraction",
     "Notre Dame is a medieval Catholic cathedral on the Ile de la Cite. Notre Dame is famous for its "
     "Gothic architecture, flying buttresses, rose windows and gargoyles. Construction of Notre Dame "
     "began in 1163 and the cathedral was largely completed by 1260."),
    ("Eiffel Tower", 48.8584, 2.2945, "attraction",
     "The Eiffel Tower is a wrought-iron lattice tower on the Champ de Mars esplanade. The Eiffel Tower was "
     "designed by the company of Gustave Eiffel and built for the 1889 World's Fair. Visitors can climb "
     "the Eiffel Tower or take lifts to its three levels."),
    ("Champs de Mars", 48.8556, 2.2986, "attraction",
     "Champs de Mars is a large public green space stretching from the military school to the river. "
     "Champs de Mars was once used as a parade ground and today hosts picnics, concerts and lawns "
     "where families relax. Champs de Mars gardens are popular at sunset."),
    ("Louvre", 48.8606, 2.3376, "museum",
     "The Louvre is the world's most visited art museum and a historic monument. The Louvre houses the "
     "Mona Lisa, the Venus de Milo and thousands of works of art. The glass pyramid entrance of the "
     "Louvre was completed in 1989."),
    ("Jardin des Plantes", 48.8440, 2.3590, "attraction",
     "Jardin des Plantes is the main botanical garden of the city, founded in 1635 as a royal garden of "
     "medicinal plants. Jardin des Plantes contains greenhouses, a small zoo called the menagerie and the "
     "galleries of the natural history museum."),
    ("Luxembourg Gardens", 48.8462, 2.3372, "attraction",
     "The Luxembourg Gardens were created in 1612 for the Luxembourg Palace. The Luxembourg Gardens are "
     "known for their lawns, tree-lined promenades, flowerbeds, the Medici Fountain and toy sailboats on "
     "the octagonal basin."),
    ("Pantheon", 48.8462, 2.3464, "attraction",
     "The Pantheon is a neoclassical monument in the Latin Quarter. Originally built as a church, the "
     "Pantheon now serves as a mausoleum for distinguished citizens, and the Pantheon crypt holds "
     "the tombs of Voltaire, Rousseau, Victor Hugo and Marie Curie."),
    ("Musee d'Orsay", 48.8600, 2.3266, "museum",
     "The Musee d'Orsay is housed in a former railway station built for the 1900 exhibition. The Musee "
     "d'Orsay holds the largest collection of impressionist and post-impressionist paintings, with "
     "works by Monet, Renoir, Degas and Van Gogh."),
    ("Place de la Concorde", 48.8656, 2.3212, "attraction",
     "Place de la Concorde is the largest public square of the city. An ancient Egyptian obelisk from "
     "Luxor stands at the centre of Place de la Concorde, flanked by two monumental fountains. During "
     "the revolution the guillotine stood on Place de la Concorde."),
    ("Grand Palais", 48.8661, 2.3125, "museum",
     "The Grand Palais is a historic exhibition hall built for the 1900 Universal Exposition. The Grand "
     "Palais is famous for its huge glass and steel nave, which hosts art fairs, fashion shows and "
     "temporary exhibitions."),
    ("Pont Neuf", 48.8571, 2.3413, "viewpoint",
     "Pont Neuf is the oldest standing bridge across the Seine, completed in 1607. Despite its name, "
     "which means new bridge, Pont Neuf has stone arches, half-moon benches and views over the river "
     "and the tip of the island."),
    ("Sainte-Chapelle", 48.8554, 2.3450, "attraction",
     "Sainte-Chapelle is a royal chapel in the Gothic Rayonnant style, consecrated in 1248. "
     "Sainte-Chapelle is renowned for its fifteen stained glass windows, which depict more than one "
     "thousand biblical scenes in vivid colours."),
    ("Hotel de Ville", 48.8566, 2.3522, "attraction",
     "The Hotel de Ville is the city hall, housing the municipal administration since 1357. The "
     "Renaissance-style facade of the Hotel de Ville was rebuilt after a fire in 1871, and its square "
     "hosts an ice rink in winter."),
    ("Centre Pompidou", 48.8607, 2.3522, "museum",
     "The Centre Pompidou is a complex of modern art with exposed pipes, escalators and ducts on its "
     "facade. The Centre Pompidou houses the national museum of modern art and a large public "
     "library."),
    ("Place des Vosges", 48.8556, 2.3655, "attraction",
     "Place des Vosges is the oldest planned square of the city, inaugurated in 1612. Place des Vosges "
     "is surrounded by red brick houses with arcades, and Victor Hugo lived at number 6."),
    ("Invalides", 48.8560, 2.3126, "museum",
     "Les Invalides is a complex of buildings containing museums and monuments relating to military "
     "history. The golden dome of the Invalides covers the tomb of Napoleon Bonaparte."),
    ("Trocadero", 48.8616, 2.2893, "viewpoint",
     "Trocadero is a hill and esplanade facing the river. The terrace of the Palais de Chaillot at "
     "Trocadero offers one of the best panoramic views over the tower, and Trocadero fountains light "
     "up in summer."),
    ("Palais Royal", 48.8637, 2.3371, "attraction",
     "The Palais Royal is a former royal palace with a quiet garden and arcades. The courtyard of the "
     "Palais Royal holds the striped columns by Daniel Buren, a famous contemporary artwork."),
    ("Saint-Sulpice", 48.8510, 2.3348, "attraction",
     "Saint-Sulpice is the second largest church of the city. Saint-Sulpice contains murals by Eugene "
     "Delacroix, a gnomon used to measure the solstices and one of the largest pipe organs in the world."),
    ("Arc du Carrousel", 48.8617, 2.3327, "artwork",
     "The Arc du Carrousel is a triumphal arch built between 1806 and 1808 to commemorate Napoleon's "
     "victories. The Arc du Carrousel is topped by a bronze quadriga and stands in the Tuileries."),
]

ISLAND = ("Isolated Pavilion", 48.8705, 2.3000)

EXTRA_POIS = [
    ("Galerie Vivienne", "gallery"), ("Fontaine Medicis", "artwork"), ("Tour Saint-Jacques", "viewpoint"),
    ("Musee Rodin", "museum"), ("Musee Cluny", "museum"), ("Galerie Colbert", "gallery"),
    ("Statue de Jeanne d'Arc", "artwork"), ("Square du Vert-Galant", "picnic_site"),
    ("Musee Carnavalet", "museum"), ("Point Zero", "attraction"), ("Galerie Perrotin", "gallery"),
    ("Kiosque des Noctambules", "artwork"), ("Belvedere des Tuileries", "viewpoint"),
    ("Musee de l'Orangerie", "museum"), ("Passage des Panoramas", "attraction"),
    ("Office de Tourisme", "information"), ("Fontaine Stravinsky", "artwork"),
    ("Musee Maillol", "museum"), ("Jardin Tino Rossi", "picnic_site"), ("Colonne Vendome", "artwork"),
]

FILLER_TOPICS = [
    ("baguette", "A traditional baguette is made from wheat flour, water, yeast and salt. Bakers compete every "
     "year for the best baguette prize, and the winner supplies bread to the presidential palace."),
    ("metro", "The metro network has sixteen lines and more than three hundred stations. The first metro line "
     "opened in 1900, and many entrances still feature art nouveau ironwork by Hector Guimard."),
    ("weather", "The climate is oceanic with mild winters and warm summers. Rain falls throughout the year, "
     "and spring and autumn are considered the most pleasant seasons for sightseeing."),
    ("cafes", "Sidewalk cafes are a central part of daily life. Customers often sit facing the street to watch "
     "passers-by while drinking espresso, and a terrace table rarely comes with a time limit."),
    ("bouquinistes", "The bouquinistes are booksellers who operate green boxes along the river quays. They sell "
     "second-hand books, old magazines, posters and postcards, a tradition dating back to the sixteenth century."),
    ("bikes", "The public bike sharing system offers mechanical and electric bicycles at stations across the "
     "city. Riders can unlock a bike with a mobile app and return it to any station."),
    ("markets", "Open-air food markets take place several times a week in most districts. Stalls sell fresh "
     "vegetables, cheese, fish and flowers, and vendors often let shoppers taste the produce."),
    ("cheese", "Cheese shops stock hundreds of varieties, from soft brie and camembert to hard comte and "
     "blue roquefort. A cheese course is traditionally served between the main course and dessert."),
    ("fashion", "Fashion week takes place twice a year and attracts designers, buyers and journalists from "
     "around the world. Haute couture houses present their collections in historic venues."),
    ("river", "Boat tours cruise along the river and pass under dozens of bridges. Evening cruises are "
     "popular because the monuments along the banks are illuminated after sunset."),
    ("pastry", "Pastry shops sell croissants, eclairs, macarons and fruit tarts. Many pastry chefs train for "
     "years, and some patisseries are as famous as restaurants."),
    ("wine", "Wine bars serve glasses from many regions, often paired with charcuterie boards. Natural wine "
     "has become especially popular in recent years among younger drinkers."),
    ("cinema", "The city has more cinema screens per inhabitant than almost anywhere else. Small art-house "
     "theatres screen classic films and retrospectives every week."),
    ("jazz", "Jazz clubs in cellar venues have hosted famous musicians since the 1940s. Live concerts often "
     "start late in the evening and continue past midnight."),
    ("districts", "The city is divided into twenty administrative districts arranged in a clockwise spiral. "
     "Each district has its own town hall and mayor."),
    ("taxis", "Taxis can be hailed on the street when the roof light is green, or booked by phone and app. "
     "Fares increase at night and on Sundays."),
    ("fountains", "Drinking water fountains painted dark green were donated by Richard Wallace in the "
     "nineteenth century. They still provide free drinking water to passers-by."),
    ("ice cream", "Ice cream parlours on the islands are known for sorbets made with seasonal fruit. Queues "
     "form on summer evenings along the narrow streets."),
    ("libraries", "Public libraries lend books, films and music for free to residents. The national library "
     "holds millions of documents, including medieval manuscripts."),
    ("opera", "Opera performances take place in two main houses, a gilded nineteenth century theatre and a "
     "modern glass building. Ballet evenings are equally popular."),
]


def node_id(i, j):
    return 100000 + i * 1000 + j


def grid_pos(i, j):
    return round(LAT0 + i * DLAT, 7), round(LON0 + j * DLON, 7)


def haversine(a, b):
    r = 6371000.0
    p1, p2 = math.radians(a[0]), math.radians(b[0])
    dp = math.radians(b[0] - a[0])
    dl = math.radians(b[1] - a[1])
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(min(1.0, h)))


def build():
    rng = random.Random(20251017)
    nodes = {}  # id -> (lat, lon, tags)
    ways = []  # (id, [node ids], tags)
    next_node = [500000]
    next_way = [1]

    def add_node(lat, lon, tags=None):
        nid = next_node[0]
        next_node[0] += 1
        nodes[nid] = (round(lat, 7), round(lon, 7), tags or [])
        return nid

    def add_way(refs, tags):
        wid = next_way[0]
        next_way[0] += 1
        ways.append((wid, refs, tags))
        return wid

    for i in range(ROWS):
        for j in range(COLS):
            lat, lon = grid_pos(i, j)
            nodes[node_id(i, j)] = (lat, lon, [])

    def block_tags(name, horizontal, i, j):
        roll = rng.random()
        if horizontal and i % 6 == 0:
            tags = [("highway", "primary"), ("sidewalk", "both")]
        elif not horizontal and j % 7 == 3:
            tags = [("highway", "footway")]
        elif roll < 0.10:
            # residential street without pedestrian tags: not walkable
            tags = [("highway", "residential")]
        elif roll < 0.45:
            tags = [("highway", "residential"), ("sidewalk", "both")]
        elif roll < 0.60:
            tags = [("highway", "residential"), ("sidewalk", rng.choice(["left", "right"]))]
        elif roll < 0.75:
            tags = [("highway", "pedestrian")]
        elif roll < 0.88:
            tags = [("highway", "footway")]
        elif roll < 0.94:
            tags = [("highway", "living_street")]
        else:
            tags = [("highway", "service"), ("foot", "yes")]
        if rng.random() < 0.12:
            tags.append(("wheelchair", "yes"))
        tags.append(("name", name))
        return tags

    for i in range(ROWS):
        for j in range(COLS - 1):
            add_way([node_id(i, j), node_id(i, j + 1)], block_tags(ROW_NAMES[i], True, i, j))
    for j in range(COLS):
        for i in range(ROWS - 1):
            add_way([node_id(i, j), node_id(i + 1, j)], block_tags(COL_NAMES[j], False, i, j))

    # Walkable components of the grid, so places attach to the main one.
    adj = {}
    for _, refs, tags in ways:
        if walkable(tags):
            for a, b in zip(refs, refs[1:]):
                adj.setdefault(a, set()).add(b)
                adj.setdefault(b, set()).add(a)
    start = node_id(ROWS // 2, COLS // 2)
    main = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in main:
                main.add(v)
                stack.append(v)

    def nearest_main(lat, lon):
        best = None
        for nid in sorted(main):
            d = haversine((lat, lon), nodes[nid][:2])
            if best is None or d < best[1]:
                best = (nid, d)
        return best[0]

    gazetteer = []
    for name, lat, lon, category, _ in PLACES:
        entrance = add_node(lat, lon, [("tourism", category), ("name", name)])
        add_way([nearest_main(lat, lon), entrance], [("highway", "footway"), ("name", f"Allee {name}")])
        gazetteer.append((name, lat, lon))

    # Island: a pedestrian loop reachable from nowhere.
    name, lat, lon = ISLAND
    a = add_node(lat, lon, [("tourism", "attraction"), ("name", name)])
    b = add_node(lat + 0.0008, lon)
    c = add_node(lat, lon + 0.0011)
    add_way([a, b, c, a], [("highway", "footway"), ("name", "Allee du Pavillon")])
    gazetteer.append((name, lat, lon))

    # Parks and lawns: small closed rings centred in grid blocks.
    for k in range(14):
        i = rng.randrange(ROWS - 1)
        j = rng.randrange(COLS - 1)
        clat = LAT0 + (i + 0.5) * DLAT
        clon = LON0 + (j + 0.5) * DLON
        h, w = DLAT * 0.25, DLON * 0.25
        ring = [
            add_node(clat - h, clon - w),
            add_node(clat - h, clon + w),
            add_node(clat + h, clon + w),
            add_node(clat + h, clon - w),
        ]
        kind = [("leisure", "park")] if k % 2 == 0 else [("landuse", "grass")]
        add_way(ring + [ring[0]], kind + [("name", f"Square {SAINTS[k]}")])

    # Street trees near blocks.
    for _ in range(220):
        i = rng.randrange(ROWS)
        j = rng.randrange(COLS - 1)
        lat, lon = grid_pos(i, j)
        add_node(lat + rng.uniform(-0.00012, 0.00012), lon + rng.uniform(0.0, DLON), [("natural", "tree")])

    # Step-free kerbs and accessible entrances.
    for _ in range(90):
        i = rng.randrange(ROWS)
        j = rng.randrange(COLS)
        lat, lon = grid_pos(i, j)
        add_node(lat + rng.uniform(-0.0002, 0.0002), lon + rng.uniform(-0.0002, 0.0002),
                 [("kerb", "flush"), ("wheelchair", "yes")])

    # Extra named POIs scattered over the grid.
    poi_positions = []
    for name, category in EXTRA_POIS:
        lat = rng.uniform(LAT0, LAT0 + (ROWS - 1) * DLAT)
        lon = rng.uniform(LON0, LON0 + (COLS - 1) * DLON)
        add_node(lat, lon, [("tourism", category), ("name", name)])
        poi_positions.append((name, category, lat, lon))

    return nodes, ways, gazetteer


WALKABLE_HIGHWAY = {"footway", "path", "pedestrian", "living_street", "steps", "track"}


def walkable(tags):
    d = dict(tags)
    return (d.get("highway") in WALKABLE_HIGHWAY
            or d.get("sidewalk") in {"left", "right", "both"}
            or d.get("foot") in {"yes", "designated"})


def kinds(tags):
    d = dict(tags)
    out = []
    if d.get("highway") == "footway" or "footway" in d or "sidewalk" in d:
        out.append("sidewalk")
    if (d.get("landuse") in {"grass", "forest", "meadow", "recreation_ground"}
            or d.get("natural") in {"wood", "tree", "scrub"}
            or d.get("leisure") in {"park", "garden"}):
        out.append("green_area")
    if d.get("wheelchair") in {"yes", "designated"}:
        out.append("accessibility")
    if d.get("tourism"):
        out.append("poi")
    return out


def write_osm(nodes, ways):
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', '<osm version="0.6" generator="gen_minicity.py">']
    lines.append(f'  <bounds minlat="{LAT0}" minlon="{LON0}" maxlat="48.872" maxlon="2.372"/>')
    for nid in sorted(nodes):
        lat, lon, tags = nodes[nid]
        if tags:
            lines.append(f'  <node id="{nid}" lat="{lat}" lon="{lon}">')
            for k, v in tags:
                lines.append(f"    <tag k={quoteattr(k)} v={quoteattr(v)}/>")
            lines.append("  </node>")
        else:
            lines.append(f'  <node id="{nid}" lat="{lat}" lon="{lon}"/>')
    for wid, refs, tags in ways:
        lines.append(f'  <way id="{wid}">')
        for r in refs:
            lines.append(f'    <nd ref="{r}"/>')
        for k, v in tags:
            lines.append(f"    <tag k={quoteattr(k)} v={quoteattr(v)}/>")
        lines.append("  </way>")
    lines.append("</osm>")
    with open(os.path.join(OUT, "map.osm"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def manifest(nodes, ways, gazetteer):
    graph_nodes = set()
    edges = set()
    for _, refs, tags in ways:
        if not walkable(tags):
            continue
        graph_nodes.update(refs)
        for a, b in zip(refs, refs[1:]):
            if a != b:
                edges.add((min(a, b), max(a, b)))
    counts = {"sidewalk": 0, "green_area": 0, "accessibility": 0, "poi": 0}
    for _, _, tags in nodes.values():
        for k in kinds(tags):
            counts[k] += 1
    for _, _, tags in ways:
        for k in kinds(tags):
            counts[k] += 1
    return {
        "extract_nodes": len(nodes),
        "extract_ways": len(ways),
        "graph_nodes": len(graph_nodes),
        "graph_edges": len(edges),
        "features": counts,
        "gazetteer_entries": len(gazetteer),
    }


def air_quality():
    grades = {}
    for la in range(4):
        for lo in range(10):
            lat = 48.84 + la * 0.01
            lon = 2.28 + lo * 0.01
            grades[f"{lat:.2f},{lon:.2f}"] = 1 + (la * 3 + lo * 2) % 5
    return grades


def slug(name):
    out = "".join(c.lower() if c.isalnum() else "-" for c in name)
    while "--" in out:
        out = out.replace("--", "-")
    return out.strip("-")


def corpus():
    rows = []
    for name, _, _, _, text in PLACES:
        rows.append({"id": f"place-{slug(name)}", "text": text, "source": "fixture-guide"})
    for name, category in EXTRA_POIS:
        rows.append({
            "id": f"poi-{slug(name)}",
            "text": f"{name} is a {category.replace('_', ' ')} worth a short stop. Locals recommend {name} "
                    f"for a quiet break during a walk, and {name} is free to visit most days.",
            "source": "fixture-guide",
        })
    k = 0
    while len(rows) < 100:
        topic, text = FILLER_TOPICS[k % len(FILLER_TOPICS)]
        part = k // len(FILLER_TOPICS)
        variants = [
            text,
            f"Practical tip about {topic}: " + text,
            f"Guidebooks often describe {topic} like this. " + text,
            f"Residents talk about {topic} every day. " + text,
        ]
        rows.append({"id": f"misc-{slug(topic)}-{part}", "text": variants[part % len(variants)], "source": "fixture-misc"})
        k += 1
    return rows


SPATIAL = [
    ("I want a route from Notre Dame to the Eiffel Tower", "Notre Dame", "Eiffel Tower"),
    ("Can you suggest a walk from the Louvre to Jardin des Plantes through green areas?", "Louvre", "Jardin des Plantes"),
    ("How do I get to the Pantheon from Musee d'Orsay? I need wheelchair accessible streets.", "Musee d'Orsay", "Pantheon"),
    ("Plan an itinerary from Trocadero to Place de la Concorde passing by museums", "Trocadero", "Place de la Concorde"),
    ("Show me a walking route from Hotel de Ville to Luxembourg Gardens", "Hotel de Ville", "Luxembourg Gardens"),
    ("I'd like to walk from Centre Pompidou to Invalides with clean air", "Centre Pompidou", "Invalides"),
    ("What's the best route from Saint-Sulpice to Place des Vosges?", "Saint-Sulpice", "Place des Vosges"),
    ("Give me directions from Grand Palais to Sainte-Chapelle along wide sidewalks", "Grand Palais", "Sainte-Chapelle"),
    ("Take me from Pont Neuf to Champs de Mars on foot, I love parks", "Pont Neuf", "Champs de Mars"),
    ("Suggest an itinerary from Palais Royal to Arc du Carrousel with viewpoints", "Palais Royal", "Arc du Carrousel"),
]

INFO_TEMPLATES = [
    "Tell me more about {}",
    "What is the history of {}?",
    "What can visitors see at {}?",
]


def eval_records():
    by_name = {p[0]: p for p in PLACES}
    names = [p[0] for p in PLACES]
    recs = []
    for n, (query, origin, dest) in enumerate(SPATIAL):
        recs.append({"query": query, "kind": "spatial", "origin": origin, "destination": dest})
        third = names[(n * 7 + 3) % len(names)]
        if third in (origin, dest):
            third = names[(n * 7 + 4) % len(names)]
        for t, target in enumerate([dest, origin, third]):
            recs.append({
                "query": INFO_TEMPLATES[(n + t) % 3].format(target),
                "kind": "information",
                "expected_passage": f"place-{slug(by_name[target][0])}",
            })
    return recs


CONFIG = """# Fixture configuration; relative paths resolve against this file.
map_path = "map.osm"
gazetteer_path = "gazetteer.csv"
air_quality = "fixture"
air_quality_path = "air_quality.json"
corpus_path = "corpus.jsonl"
listen = "127.0.0.1:8080"
alternatives = 3
top_k = 3
tau = 5.0
weight_sidewalk = 0.25
weight_pollution = 0.25
weight_green_area = 0.25
weight_accessibility = 0.25
indicator_buffer_m = 100.0
poi_buffer_m = 200.0
max_snap_m = 500.0
penalty_factor = 1.4
encoder = "hashing"
encoder_dim = 256
index_mode = "exact"
llm = "mock"
classifier = "rules"
"""


def main():
    os.makedirs(OUT, exist_ok=True)
    nodes, ways, gazetteer = build()
    write_osm(nodes, ways)
    with open(os.path.join(OUT, "gazetteer.csv"), "w", encoding="utf-8") as f:
        f.write("name,lat,lon\n")
        for name, lat, lon in gazetteer:
            f.write(f"{name},{lat},{lon}\n")
    with open(os.path.join(OUT, "air_quality.json"), "w", encoding="utf-8") as f:
        json.dump(air_quality(), f, indent=2, sort_keys=True)
        f.write("\n")
    with open(os.path.join(OUT, "corpus.jsonl"), "w", encoding="utf-8") as f:
        for row in corpus():
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    with open(os.path.join(OUT, "eval.jsonl"), "w", encoding="utf-8") as f:
        for rec in eval_records():
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    with open(os.path.join(OUT, "walkrag.toml"), "w", encoding="utf-8") as f:
        f.write(CONFIG)
    with open(os.path.join(OUT, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest(nodes, ways, gazetteer), f, indent=2, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main()
