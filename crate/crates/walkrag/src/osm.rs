//! OSM-XML subset: `node`, `way`, `nd` and `tag` elements.

use std::io::{Read, Write};

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use walkrag_core::extract::{ExtractError, MapExtract, Node, Tags, Way};
use walkrag_core::LatLon;

#[derive(Debug, thiserror::Error)]
pub enum OsmError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input at line {line}: {reason}")]
    MalformedInput { line: usize, reason: String },
    #[error(transparent)]
    Invalid(#[from] ExtractError),
}

impl OsmError {
    pub fn line(&self) -> Option<usize> {
        match self {
            OsmError::MalformedInput { line, .. } => Some(*line),
            _ => None,
        }
    }
}

enum Current {
    None,
    Node(Node),
    Way(Way),
    /// Inside an element we do not model (relation, bounds, ...).
    Skipped(usize),
}

fn line_at(bytes: &[u8], pos: u64) -> usize {
    let end = (pos as usize).min(bytes.len());
    bytes[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

struct Attrs {
    pairs: Vec<(String, String)>,
}

impl Attrs {
    fn of(e: &BytesStart<'_>) -> Result<Self, String> {
        let mut pairs = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| err.to_string())?;
            let key = String::from_utf8(attr.key.as_ref().to_vec()).map_err(|err| err.to_string())?;
            let value = attr.unescape_value().map_err(|err| err.to_string())?.into_owned();
            pairs.push((key, value));
        }
        Ok(Self { pairs })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn required<T: std::str::FromStr>(&self, element: &str, key: &str) -> Result<T, String> {
        let raw = self.get(key).ok_or_else(|| format!("<{element}> is missing `{key}`"))?;
        raw.parse().map_err(|_| format!("<{element}> has invalid `{key}`: {raw:?}"))
    }
}

/// Reads an OSM-XML document. Unknown elements are skipped; way order is kept.
pub fn parse_map_extract(mut input: impl Read) -> Result<MapExtract, OsmError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut reader = Reader::from_reader(bytes.as_slice());
    reader.config_mut().trim_text(true);
    let mut extract = MapExtract::default();
    let mut current = Current::None;
    let mut buf = Vec::new();
    loop {
        let mut pos = reader.buffer_position();
        while bytes.get(pos as usize).is_some_and(u8::is_ascii_whitespace) {
            pos += 1;
        }
        let event = reader.read_event_into(&mut buf).map_err(|err| OsmError::MalformedInput {
            line: line_at(&bytes, reader.error_position()),
            reason: err.to_string(),
        })?;
        let malformed = |reason: String| OsmError::MalformedInput { line: line_at(&bytes, pos), reason };
        match event {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = e.name();
                match (&mut current, name.as_ref()) {
                    (Current::Skipped(depth), _) => {
                        if !empty {
                            *depth += 1;
                        }
                    }
                    (Current::None, b"node") => {
                        let a = Attrs::of(e).map_err(malformed)?;
                        let node = Node {
                            id: a.required("node", "id").map_err(malformed)?,
                            pos: LatLon::new(
                                a.required("node", "lat").map_err(malformed)?,
                                a.required("node", "lon").map_err(malformed)?,
                            ),
                            tags: Tags::new(),
                        };
                        if empty {
                            extract.nodes.push(node);
                        } else {
                            current = Current::Node(node);
                        }
                    }
                    (Current::None, b"way") => {
                        let a = Attrs::of(e).map_err(malformed)?;
                        let way = Way {
                            id: a.required("way", "id").map_err(malformed)?,
                            nodes: Vec::new(),
                            tags: Tags::new(),
                        };
                        if empty {
                            extract.ways.push(way);
                        } else {
                            current = Current::Way(way);
                        }
                    }
                    (Current::None, b"osm") => {}
                    (Current::Node(node), b"tag") => {
                        let a = Attrs::of(e).map_err(malformed)?;
                        node.tags.insert(
                            a.required::<String>("tag", "k").map_err(malformed)?,
                            a.required::<String>("tag", "v").map_err(malformed)?,
                        );
                    }
                    (Current::Way(way), b"tag") => {
                        let a = Attrs::of(e).map_err(malformed)?;
                        way.tags.insert(
                            a.required::<String>("tag", "k").map_err(malformed)?,
                            a.required::<String>("tag", "v").map_err(malformed)?,
                        );
                    }
                    (Current::Way(way), b"nd") => {
                        let a = Attrs::of(e).map_err(malformed)?;
                        way.nodes.push(a.required("nd", "ref").map_err(malformed)?);
                    }
                    _ => {
                        if !empty {
                            current = match current {
                                Current::None => Current::Skipped(1),
                                other => other,
                            };
                        }
                    }
                }
            }
            Event::End(ref e) => match &mut current {
                Current::Skipped(depth) => {
                    *depth -= 1;
                    if *depth == 0 {
                        current = Current::None;
                    }
                }
                Current::Node(_) if e.name().as_ref() == b"node" => {
                    if let Current::Node(node) = std::mem::replace(&mut current, Current::None) {
                        extract.nodes.push(node);
                    }
                }
                Current::Way(_) if e.name().as_ref() == b"way" => {
                    if let Current::Way(way) = std::mem::replace(&mut current, Current::None) {
                        extract.ways.push(way);
                    }
                }
                _ => {}
            },
            _ => {}
        }
        buf.clear();
    }
    extract.validate()?;
    Ok(extract)
}

fn write_tags(out: &mut impl Write, tags: &Tags) -> std::io::Result<()> {
    for (k, v) in tags.iter() {
        writeln!(out, "    <tag k=\"{}\" v=\"{}\"/>", escape(k), escape(v))?;
    }
    Ok(())
}

/// Serializes an extract in the same subset [`parse_map_extract`] reads.
pub fn write_map_extract(extract: &MapExtract, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>")?;
    writeln!(out, "<osm version=\"0.6\" generator=\"walkrag\">")?;
    for n in &extract.nodes {
        if n.tags.is_empty() {
            writeln!(out, "  <node id=\"{}\" lat=\"{}\" lon=\"{}\"/>", n.id, n.pos.lat, n.pos.lon)?;
        } else {
            writeln!(out, "  <node id=\"{}\" lat=\"{}\" lon=\"{}\">", n.id, n.pos.lat, n.pos.lon)?;
            write_tags(&mut out, &n.tags)?;
            writeln!(out, "  </node>")?;
        }
    }
    for w in &extract.ways {
        writeln!(out, "  <way id=\"{}\">", w.id)?;
        for r in &w.nodes {
            writeln!(out, "    <nd ref=\"{r}\"/>")?;
        }
        write_tags(&mut out, &w.tags)?;
        writeln!(out, "  </way>")?;
    }
    writeln!(out, "</osm>")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_NODES: &str = r#"<?xml version="1.0"?>
<osm version="0.6">
  <bounds minlat="48.8" minlon="2.2" maxlat="48.9" maxlon="2.4"/>
  <node id="1" lat="48.85" lon="2.29"/>
  <node id="2" lat="48.851" lon="2.291">
    <tag k="tourism" v="museum"/>
  </node>
  <way id="10">
    <nd ref="1"/>
    <nd ref="2"/>
    <tag k="highway" v="footway"/>
  </way>
  <relation id="5">
    <member type="way" ref="10" role="outer"/>
    <tag k="type" v="multipolygon"/>
  </relation>
</osm>"#;

    #[test]
    fn parses_nodes_ways_and_tags() {
        let e = parse_map_extract(TWO_NODES.as_bytes()).unwrap();
        assert_eq!(e.nodes.len(), 2);
        assert_eq!(e.ways.len(), 1);
        assert_eq!(e.ways[0].nodes, vec![1, 2]);
        assert_eq!(e.ways[0].tags.get("highway"), Some("footway"));
        assert_eq!(e.nodes[1].tags.get("tourism"), Some("museum"));
        assert!(e.nodes[0].tags.is_empty());
    }

    #[test]
    fn empty_document() {
        let e = parse_map_extract(r#"<osm version="0.6"/>"#.as_bytes()).unwrap();
        assert!(e.nodes.is_empty() && e.ways.is_empty());
        let e = parse_map_extract("<osm></osm>".as_bytes()).unwrap();
        assert_eq!(e, MapExtract::default());
    }

    #[test]
    fn dangling_reference() {
        let doc = r#"<osm><node id="1" lat="0" lon="0"/><way id="3"><nd ref="1"/><nd ref="2"/></way></osm>"#;
        let err = parse_map_extract(doc.as_bytes()).unwrap_err();
        assert!(matches!(err, OsmError::Invalid(ExtractError::DanglingReference { way_id: 3, node_id: 2 })), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let doc = "<osm>\n  <node id=\"1\" lat=\"0\" lon=\"0\"/>\n  <way id=\"2\">\n  </node>\n</osm>";
        let err = parse_map_extract(doc.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(4), "{err}");
    }

    #[test]
    fn bad_attribute_reports_line() {
        let doc = "<osm>\n<node id=\"1\" lat=\"north\" lon=\"0\"/>\n</osm>";
        let err = parse_map_extract(doc.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(2), "{err}");
    }

    #[test]
    fn write_then_parse_is_identity() {
        let e = parse_map_extract(TWO_NODES.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_map_extract(&e, &mut out).unwrap();
        assert_eq!(parse_map_extract(out.as_slice()).unwrap(), e);
    }

    #[test]
    fn escaped_values_survive() {
        let doc =
            r#"<osm><node id="1" lat="0" lon="0"><tag k="name" v="Caf&#233; &amp; &quot;Bar&quot;"/></node></osm>"#;
        let e = parse_map_extract(doc.as_bytes()).unwrap();
        assert_eq!(e.nodes[0].tags.get("name"), Some("Café & \"Bar\""));
        let mut out = Vec::new();
        write_map_extract(&e, &mut out).unwrap();
        assert_eq!(parse_map_extract(out.as_slice()).unwrap(), e);
    }
}
