#!/usr/bin/env python3
"""Writes the raw fixture corpora (fixtures/standard, tests/data/small12).

The files written here are raw input; run `forge corpus seal <dir>` afterwards
to canonicalize them and write the manifest.

    python3 tools/make_fixtures.py && build/forge corpus seal fixtures/standard \
        && build/forge corpus seal tests/data/small12
"""

import json
import math
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DBR = "http://dbpedia.org/resource/"
RETRIEVED = "2024-05-01T12:00:00Z"


def iri(name):
    return name if ":" in name else DBR + name


class Corpus:
    def __init__(self, snapshot):
        self.snapshot = snapshot
        self.entities = {}
        self.maps = {}

    def entity(self, name, label, kind, geo=None, images=()):
        self.entities[iri(name)] = {
            "id": iri(name),
            "label": label,
            "kind": kind,
            "geo": None if geo is None else {"lat": geo[0], "lon": geo[1]},
            "facts": [],
            "images": [{"url": u, "caption": c} for u, c in images],
        }

    def fact(self, subject, predicate, obj, raw=None, literal=None):
        subject = iri(subject)
        if literal is None:
            value = {"type": "entity", "id": iri(obj)}
        else:
            value = {"type": literal, "value": obj}
        self.entities[subject]["facts"].append({
            "subject": subject,
            "predicate": predicate,
            "raw": raw or RAW[predicate],
            "object": value,
            "provenance": {
                "repository": "fixture",
                "retrieved_at": RETRIEVED,
                "source_ref": f"{self.snapshot}/{subject.rsplit('/', 1)[-1]}.nt",
            },
        })

    def person(self, name, label, born, birth_place, occupation, gender, images=()):
        self.entity(name, label, "person", images=images)
        self.fact(name, "birth-date", born, literal="date")
        if birth_place:
            self.fact(name, "birth-place", birth_place)
        for job in occupation if isinstance(occupation, list) else [occupation]:
            self.fact(name, "occupation", job, literal="text")
        self.fact(name, "generic-link", gender, raw="gender", literal="text")

    def place(self, name, label, geo, located_in=None, streets=0):
        self.entity(name, label, "place", geo=geo)
        if located_in:
            self.fact(name, "located-in", located_in)
        if streets:
            self.maps[iri(name)] = city_map(iri(name), label, geo, streets)

    def write(self, directory):
        directory = ROOT / directory
        for sub in ("entities", "maps"):
            shutil.rmtree(directory / sub, ignore_errors=True)
            (directory / sub).mkdir(parents=True)
        (directory / "manifest").unlink(missing_ok=True)
        for n, entity in enumerate(sorted(self.entities)):
            path = directory / "entities" / f"raw-{n:03d}.json"
            path.write_text(json.dumps(self.entities[entity], indent=2, ensure_ascii=False) + "\n")
        for n, place in enumerate(sorted(self.maps)):
            path = directory / "maps" / f"raw-{n:03d}.json"
            path.write_text(json.dumps(self.maps[place], indent=2) + "\n")


RAW = {
    "birth-date": "birthDate",
    "death-date": "deathDate",
    "occupation": "occupation",
    "birth-place": "birthPlace",
    "spouse": "spouse",
    "colleague": "associatedActs",
    "known-for": "knownFor",
    "located-in": "country",
    "creator-of": "notableWork",
    "generic-link": "wikiPageWikiLink",
}


def offset(geo, north_km, east_km):
    lat = geo[0] + north_km / 111.32
    lon = geo[1] + east_km / (111.32 * math.cos(math.radians(geo[0])))
    return [round(lat, 6), round(lon, 6)]


def city_map(place, label, geo, streets):
    """Roads cross the 1 km box and run past it, so clipping is exercised."""
    features = []
    names = ["Main Street", "King Street", "Queen Street", "Park Avenue", "River Road"]
    for s in range(streets):
        north = -0.6 + 0.4 * s
        features.append({
            "kind": "road",
            "name": names[s % len(names)],
            "points": [offset(geo, north, -1.8), offset(geo, north + 0.1, 0.0), offset(geo, north, 1.8)],
        })
    features.append({
        "kind": "building",
        "name": f"{label} City Hall",
        "points": [offset(geo, 0.1, 0.1), offset(geo, 0.1, 0.3), offset(geo, 0.3, 0.3), offset(geo, 0.3, 0.1)],
    })
    features.append({
        "kind": "building",
        "name": f"{label} Central Library",
        "points": [offset(geo, -0.3, -0.2), offset(geo, -0.3, 1.4), offset(geo, -0.1, 1.4), offset(geo, -0.1, -0.2)],
    })
    if streets >= 3:
        features.append({
            "kind": "water",
            "name": f"{label} River",
            "points": [offset(geo, -1.5, -0.4), offset(geo, 0.0, -0.5), offset(geo, 1.5, -0.3)],
        })
    features.append({"kind": "landmark", "name": f"{label} Monument", "points": [offset(geo, 0.05, -0.05)]})
    features.append({"kind": "landmark", "name": f"{label} Airport", "points": [offset(geo, 4.0, 6.0)]})
    return {"place": place, "features": features}


def commons(name):
    return f"https://commons.wikimedia.org/wiki/File:{name}.jpg"


def standard():
    c = Corpus("snapshot/dbpedia-2024-05")

    countries = {
        "Canada": ("Canada", (56.13, -106.35)),
        "United_States": ("United States", (39.83, -98.58)),
        "United_Kingdom": ("United Kingdom", (54.0, -2.5)),
        "Germany": ("Germany", (51.17, 10.45)),
        "Barbados": ("Barbados", (13.19, -59.54)),
        "Denmark": ("Denmark", (56.26, 9.5)),
        "Poland": ("Poland", (51.92, 19.15)),
    }
    for name, (label, geo) in countries.items():
        c.place(name, label, geo)

    cities = [
        ("London,_Ontario", "London, Ontario", (42.9849, -81.2453), "Canada", 3),
        ("Stratford,_Ontario", "Stratford, Ontario", (43.3701, -80.9822), "Canada", 2),
        ("Toronto", "Toronto", (43.6532, -79.3832), "Canada", 3),
        ("Pickering,_Ontario", "Pickering, Ontario", (43.8384, -79.0868), "Canada", 1),
        ("Dallas", "Dallas", (32.7767, -96.797), "United_States", 3),
        ("Champaign,_Illinois", "Champaign, Illinois", (40.1164, -88.2434), "United_States", 2),
        ("New_York_City", "New York City", (40.7128, -74.006), "United_States", 3),
        ("Grand_Prairie,_Texas", "Grand Prairie, Texas", (32.7459, -96.9978), "United_States", 2),
        ("Boca_Raton,_Florida", "Boca Raton, Florida", (26.3683, -80.1289), "United_States", 2),
        ("Tucson,_Arizona", "Tucson, Arizona", (32.2226, -110.9747), "United_States", 2),
        ("Halifax,_West_Yorkshire", "Halifax, West Yorkshire", (53.7248, -1.8658), "United_Kingdom", 2),
        ("Saint_Michael,_Barbados", "Saint Michael, Barbados", (13.1132, -59.5988), "Barbados", 1),
        ("Hell's_Kitchen,_Manhattan", "Hell's Kitchen, Manhattan", (40.7638, -73.9918), "New_York_City", 2),
        ("Ulm", "Ulm", (48.4011, 9.9876), "Germany", 2),
        ("Grantham", "Grantham", (52.9118, -0.6423), "United_Kingdom", 2),
        ("Copenhagen", "Copenhagen", (55.6761, 12.5683), "Denmark", 3),
        ("Warsaw", "Warsaw", (52.2297, 21.0122), "Poland", 3),
        ("Kiel", "Kiel", (54.3233, 10.1228), "Germany", 1),
    ]
    for name, label, geo, country, streets in cities:
        c.place(name, label, geo, country, streets)

    c.person("Justin_Bieber", "Justin Bieber", "1994-03-01", "London,_Ontario", "singer", "male",
             images=[(commons("Justin_Bieber_in_2015"), "Justin Bieber in 2015"),
                     (commons("Bieber_tour_stage"), "Concert stage lighting")])
    c.person("Pattie_Mallette", "Pattie Mallette", "1975-04-15", "Stratford,_Ontario", "author", "female")
    c.person("Usher_(musician)", "Usher", "1978-10-14", "Dallas", ["singer", "dancer"], "male",
             images=[(commons("Usher_2014"), "Usher performing")])
    c.person("Scooter_Braun", "Scooter Braun", "1981-06-18", "New_York_City", "talent manager", "male")
    c.person("Ludacris", "Ludacris", "1977-09-11", "Champaign,_Illinois", "rapper", "male")
    c.person("Selena_Gomez", "Selena Gomez", "1992-07-22", "Grand_Prairie,_Texas", ["singer", "actress"], "female",
             images=[(commons("Selena_Gomez_2019"), "Selena Gomez at a premiere")])
    c.person("Ed_Sheeran", "Ed Sheeran", "1991-02-17", "Halifax,_West_Yorkshire", "singer-songwriter", "male")
    c.person("Ariana_Grande", "Ariana Grande", "1993-06-26", "Boca_Raton,_Florida", "singer", "female")
    c.person("Drake_(musician)", "Drake", "1986-10-24", "Toronto", "rapper", "male")
    c.person("Shawn_Mendes", "Shawn Mendes", "1998-08-08", "Pickering,_Ontario", "singer", "male")
    c.person("Hailey_Bieber", "Hailey Bieber", "1996-11-22", "Tucson,_Arizona", "model", "female",
             images=[(commons("Hailey_Baldwin_2017"), "Fashion week runway")])
    c.person("Rihanna", "Rihanna", "1988-02-20", "Saint_Michael,_Barbados", ["singer", "businesswoman"], "female")
    c.person("Alicia_Keys", "Alicia Keys", "1981-01-25", "Hell's_Kitchen,_Manhattan", ["singer", "pianist"], "female")
    c.person("Jaden_Smith", "Jaden Smith", "1998-07-08", None, ["actor", "rapper"], "male")
    c.person("Chance_the_Rapper", "Chance the Rapper", "1993-04-16", None, "rapper", "male")

    c.entity("Believe_(Justin_Bieber_album)", "Believe", "work")
    c.entity("Purpose_(Justin_Bieber_album)", "Purpose", "work")
    c.entity("Despacito", "Despacito", "work")
    c.entity("RBMG_Records", "RBMG Records", "organization")
    c.fact("RBMG_Records", "located-in", "Dallas", raw="location")

    c.fact("Justin_Bieber", "creator-of", "Believe_(Justin_Bieber_album)")
    c.fact("Justin_Bieber", "creator-of", "Purpose_(Justin_Bieber_album)")
    c.fact("Justin_Bieber", "known-for", "Despacito")
    c.fact("Justin_Bieber", "spouse", "Hailey_Bieber")
    c.fact("Justin_Bieber", "generic-link", "Pattie_Mallette", raw="parent")
    c.fact("Justin_Bieber", "generic-link", "RBMG_Records", raw="recordLabel")
    for act in ["Usher_(musician)", "Scooter_Braun", "Ludacris", "Ed_Sheeran", "Ariana_Grande", "Drake_(musician)",
                "Shawn_Mendes", "Chance_the_Rapper", "Jaden_Smith"]:
        c.fact("Justin_Bieber", "colleague", act)
    c.fact("Selena_Gomez", "generic-link", "Justin_Bieber", raw="partner")
    c.fact("Usher_(musician)", "generic-link", "RBMG_Records", raw="recordLabel")
    c.fact("Usher_(musician)", "colleague", "Ludacris")
    c.fact("Usher_(musician)", "colleague", "Alicia_Keys")
    c.fact("Scooter_Braun", "generic-link", "RBMG_Records", raw="founder")
    c.fact("Scooter_Braun", "colleague", "Ariana_Grande")
    c.fact("Ariana_Grande", "colleague", "Selena_Gomez")
    c.fact("Drake_(musician)", "colleague", "Rihanna")
    c.fact("Rihanna", "colleague", "Alicia_Keys")
    c.fact("Ed_Sheeran", "colleague", "Shawn_Mendes")
    c.fact("Shawn_Mendes", "colleague", "Drake_(musician)")
    c.fact("Chance_the_Rapper", "colleague", "Ludacris")
    c.fact("Despacito", "generic-link", "Justin_Bieber", raw="musicalArtist")
    c.fact("Pattie_Mallette", "generic-link", "London,_Ontario", raw="residence")

    # A second, unrelated cluster used by lie and image tests.
    c.person("Albert_Einstein", "Albert Einstein", "1879-03-14", "Ulm", ["physicist", "professor"], "male",
             images=[(commons("Albert_Einstein_Head"), "Albert Einstein portrait, 1947")])
    c.fact("Albert_Einstein", "death-date", "1955-04-18", literal="date")
    c.person("Mileva_Maric", "Mileva Marić", "1875-12-19", None, "physicist", "female")
    c.person("Niels_Bohr", "Niels Bohr", "1885-10-07", "Copenhagen", "physicist", "male")
    c.person("Max_Planck", "Max Planck", "1858-04-23", "Kiel", "physicist", "male")
    c.person("Marie_Curie", "Marie Curie", "1867-11-07", "Warsaw", ["physicist", "chemist"], "female")
    c.entity("Theory_of_relativity", "Theory of relativity", "work")
    c.fact("Albert_Einstein", "spouse", "Mileva_Maric")
    c.fact("Albert_Einstein", "known-for", "Theory_of_relativity")
    c.fact("Albert_Einstein", "colleague", "Niels_Bohr")
    c.fact("Albert_Einstein", "colleague", "Max_Planck")
    c.fact("Albert_Einstein", "colleague", "Marie_Curie")
    c.fact("Niels_Bohr", "colleague", "Max_Planck")

    c.person("Margaret_Thatcher", "Margaret Thatcher", "1925-10-13", "Grantham", "politician", "female",
             images=[(commons("Margaret_Thatcher_portrait"), "Margaret Thatcher portrait"),
                     (commons("Downing_Street_1985"), "Downing Street, 1985")])
    c.fact("Margaret_Thatcher", "death-date", "2013-04-08", literal="date")
    c.write("fixtures/standard")


def small12():
    """Victim with exactly seven related persons; colleague edges by hand."""
    c = Corpus("snapshot/small12")
    c.place("Northland", "Northland", (60.0, 10.0))
    c.place("Harbor_City", "Harbor City", (59.9, 10.7), "Northland", streets=3)
    c.place("Hill_Town", "Hill Town", (60.4, 9.5), "Northland", streets=1)
    c.entity("The_Atlas", "The Atlas", "work")
    people = [
        ("Vera_Victim", "Vera Victim", "1950-05-05", "Harbor_City", "cartographer", "female"),
        ("Ada_One", "Ada One", "1951-01-01", "Harbor_City", "surveyor", "female"),
        ("Ben_Two", "Ben Two", "1952-02-02", "Hill_Town", "engraver", "male"),
        ("Cy_Three", "Cy Three", "1953-03-03", "Hill_Town", "printer", "male"),
        ("Di_Four", "Di Four", "1954-04-04", "Harbor_City", "navigator", "female"),
        ("Ed_Five", "Ed Five", "1955-05-06", "Hill_Town", "surveyor", "male"),
        ("Flo_Six", "Flo Six", "1956-06-06", "Harbor_City", "editor", "female"),
        ("Gus_Seven", "Gus Seven", "1957-07-07", "Hill_Town", "archivist", "male"),
    ]
    for name, label, born, place, job, gender in people:
        c.person(name, label, born, place, job, gender)
    for other in ["Ada_One", "Ben_Two", "Cy_Three", "Di_Four"]:
        c.fact("Vera_Victim", "colleague", other)
    c.fact("Ada_One", "colleague", "Ed_Five")
    c.fact("Ben_Two", "colleague", "Flo_Six")
    c.fact("Cy_Three", "colleague", "Gus_Seven")
    c.fact("Ada_One", "colleague", "Ben_Two")
    c.fact("Vera_Victim", "creator-of", "The_Atlas")
    c.write("tests/data/small12")


if __name__ == "__main__":
    standard()
    small12()
