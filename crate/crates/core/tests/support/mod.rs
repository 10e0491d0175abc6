//! Shared generators for the integration tests.
#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crawlsieve::langid::{train, LangModel, TrainConfig, TrainReport};
use crawlsieve::pipeline::{InputFormat, PipelineConfig, StageToggles};
use crawlsieve::record_io::{RawRecord, WarcWriter};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const EN_CONTENT: &[&str] = &[
    "river",
    "garden",
    "window",
    "morning",
    "village",
    "teacher",
    "market",
    "bridge",
    "winter",
    "harbor",
    "kitchen",
    "forest",
    "library",
    "mountain",
    "engine",
    "letter",
    "painting",
    "history",
    "weather",
    "station",
    "science",
    "student",
    "farmer",
    "journey",
    "machine",
    "country",
    "summer",
    "evening",
    "island",
    "museum",
    "doctor",
    "meadow",
    "orchard",
    "council",
    "theater",
    "planet",
    "valley",
    "workshop",
    "harvest",
    "college",
    "neighbor",
    "simple",
    "bright",
    "careful",
    "ancient",
    "quiet",
    "modern",
    "gentle",
    "narrow",
    "heavy",
    "golden",
    "local",
    "famous",
    "patient",
    "useful",
    "steady",
    "curious",
    "sudden",
    "honest",
    "remote",
    "crowded",
    "walks",
    "builds",
    "carries",
    "follows",
    "explains",
    "reaches",
    "watches",
    "changes",
    "supports",
    "describes",
    "collects",
    "improves",
    "remembers",
    "prepares",
    "discovers",
    "measures",
    "protects",
    "welcomes",
    "repairs",
    "opens",
    "closes",
    "during",
    "through",
    "between",
    "across",
    "before",
    "after",
    "toward",
    "around",
    "slowly",
    "always",
    "rarely",
    "often",
    "together",
    "recently",
    "nearly",
    "clearly",
    "usually",
    "perhaps",
    "family",
    "company",
    "season",
    "picture",
    "problem",
    "answer",
    "lesson",
    "record",
    "pattern",
    "surface",
    "coffee",
    "bread",
    "paper",
    "music",
    "people",
    "children",
    "water",
    "stone",
    "travel",
    "sister",
    "animal",
    "northern",
    "southern",
    "wooden",
    "silver",
    "common",
    "public",
    "private",
    "useful",
    "open",
    "yellow",
];
pub const EN_FUNCTION: &[&str] = &[
    "the", "of", "and", "to", "in", "with", "that", "is", "for", "on", "a", "was", "it", "they", "we", "at", "by",
    "from", "this", "be", "have", "as", "but", "when",
];
pub const DE_CONTENT: &[&str] = &[
    "Fluss",
    "Garten",
    "Fenster",
    "Morgen",
    "Dorf",
    "Lehrer",
    "Markt",
    "Brücke",
    "Winter",
    "Hafen",
    "Küche",
    "Wald",
    "Bibliothek",
    "Berg",
    "Maschine",
    "Brief",
    "Gemälde",
    "Geschichte",
    "Wetter",
    "Bahnhof",
    "Wissenschaft",
    "Schüler",
    "Bauer",
    "Reise",
    "Fahrzeug",
    "Landschaft",
    "Sommer",
    "Abend",
    "Insel",
    "Museum",
    "Ärztin",
    "Wiese",
    "Obstgarten",
    "Gemeinderat",
    "Theater",
    "Planet",
    "Tal",
    "Werkstatt",
    "Ernte",
    "Hochschule",
    "Nachbarin",
    "einfach",
    "hell",
    "vorsichtig",
    "uralt",
    "ruhig",
    "modern",
    "sanft",
    "schmal",
    "schwer",
    "golden",
    "örtlich",
    "berühmt",
    "geduldig",
    "nützlich",
    "ständig",
    "neugierig",
    "plötzlich",
    "ehrlich",
    "entfernt",
    "überfüllt",
    "geht",
    "baut",
    "trägt",
    "folgt",
    "erklärt",
    "erreicht",
    "beobachtet",
    "verändert",
    "unterstützt",
    "beschreibt",
    "sammelt",
    "verbessert",
    "erinnert",
    "bereitet",
    "entdeckt",
    "misst",
    "schützt",
    "begrüßt",
    "repariert",
    "öffnet",
    "schließt",
    "während",
    "durch",
    "zwischen",
    "über",
    "vorher",
    "nachher",
    "langsam",
    "immer",
    "selten",
    "oft",
    "zusammen",
    "kürzlich",
    "beinahe",
    "deutlich",
    "gewöhnlich",
    "vielleicht",
    "Familie",
    "Unternehmen",
    "Jahreszeit",
    "Bild",
    "Aufgabe",
    "Antwort",
    "Unterricht",
    "Muster",
    "Oberfläche",
    "Kaffee",
    "Brot",
    "Papier",
    "Musik",
    "Menschen",
    "Kinder",
    "Wasser",
    "Stein",
    "Schwester",
    "Tier",
    "nördlich",
    "südlich",
    "hölzern",
    "silbern",
    "gemeinsam",
    "öffentlich",
    "gelb",
    "Straße",
    "Frühling",
    "Gebäude",
    "Zeitung",
];
pub const DE_FUNCTION: &[&str] = &[
    "der", "die", "das", "und", "zu", "mit", "von", "ist", "für", "auf", "ein", "eine", "war", "es", "sie", "wir",
    "bei", "aus", "dieser", "nicht", "auch", "sich", "dem", "den",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lang {
    En,
    De,
}

impl Lang {
    pub fn label(self) -> &'static str {
        match self {
            Lang::En => "en",
            Lang::De => "de",
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Words drawn from the content and function lists, about a third function words.
pub fn words(r: &mut impl Rng, lang: Lang, n: usize) -> Vec<String> {
    let (content, func) = match lang {
        Lang::En => (EN_CONTENT, EN_FUNCTION),
        Lang::De => (DE_CONTENT, DE_FUNCTION),
    };
    (0..n)
        .map(|_| {
            let pool = if r.gen_bool(0.35) { func } else { content };
            pool.choose(r).unwrap().to_string()
        })
        .collect()
}

/// One capitalized sentence of `min..=max` words ending in a period.
pub fn sentence(r: &mut impl Rng, lang: Lang, min: usize, max: usize) -> String {
    let n = r.gen_range(min..=max);
    let mut w = words(r, lang, n);
    w[0] = capitalize(&w[0]);
    w.join(" ") + "."
}

/// Lines of one or two sentences each.
pub fn prose_lines(r: &mut impl Rng, lang: Lang, lines: usize) -> Vec<String> {
    (0..lines)
        .map(|_| {
            let k = r.gen_range(1..=2);
            (0..k).map(|_| sentence(r, lang, 8, 14)).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

pub fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A page with the given paragraphs as the article, optionally wrapped in
/// navigation, script and footer boilerplate.
pub fn html_page(title: &str, paragraphs: &[String], boilerplate: bool) -> String {
    let mut s = String::from("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>");
    s += &html_escape(title);
    s += "</title><style>body { color: black; }</style></head>\n<body>\n";
    if boilerplate {
        s += "<nav><a href=\"/\">Home</a> | <a href=\"/about\">About us</a> | <a href=\"/contact\">Contact</a></nav>\n";
        s += "<script>window.dataLayer = window.dataLayer || [];</script>\n";
    }
    s += "<article>\n";
    for p in paragraphs {
        s += "<p>";
        s += &html_escape(p);
        s += "</p>\n";
    }
    s += "</article>\n";
    if boilerplate {
        s += "<footer>Copyright 2024 Example Media. All rights reserved. <a href=\"/privacy\">Privacy</a></footer>\n";
    }
    s += "</body></html>\n";
    s
}

pub fn http_response(html: &str) -> Vec<u8> {
    let mut v = b"HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\n\r\n".to_vec();
    v.extend_from_slice(html.as_bytes());
    v
}

pub fn record_id(n: usize) -> String {
    format!("<urn:uuid:00000000-0000-4000-8000-{n:012}>")
}

/// Labeled sentences for the toy classifier, `per_lang` of each language.
pub fn bilingual_samples(seed: u64, per_lang: usize) -> Vec<(String, String)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for lang in [Lang::En, Lang::De] {
        for _ in 0..per_lang {
            let n = r.gen_range(1..=3);
            let text: Vec<String> = (0..n).map(|_| sentence(&mut r, lang, 4, 12)).collect();
            out.push((text.join(" "), lang.label().to_string()));
        }
    }
    out
}

pub fn train_toy_lid(seed: u64) -> (LangModel, TrainReport) {
    let cfg = TrainConfig { seed, hash_dim: 1 << 16, ..Default::default() };
    train(&bilingual_samples(seed, 400), &cfg).expect("toy training succeeds")
}

/// What the pipeline should do with a fixture document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fate {
    Kept,
    Dropped { stage: &'static str, rule: &'static str },
}

pub struct FixtureCrawl {
    pub dir: PathBuf,
    pub warcs: Vec<PathBuf>,
    pub blocklist: PathBuf,
    pub model: PathBuf,
    /// `(record id, dump, fate)` for every response record.
    pub docs: Vec<(String, String, Fate)>,
}

impl FixtureCrawl {
    /// Every stage on except the score gate, reading the fixture WARCs.
    pub fn config(&self) -> PipelineConfig {
        let mut cfg = PipelineConfig {
            inputs: self.warcs.clone(),
            format: InputFormat::Warc,
            blocklist: Some(self.blocklist.clone()),
            seed: 7,
            stages: StageToggles::default(),
            ..Default::default()
        };
        cfg.language.model = Some(self.model.clone());
        cfg
    }

    /// Ids that survive when exactly the stages in `enabled` run.
    pub fn expected_kept(&self, enabled: &[&str]) -> Vec<String> {
        let mut v: Vec<String> = self
            .docs
            .iter()
            .filter(|(_, _, f)| match f {
                Fate::Kept => true,
                Fate::Dropped { stage, .. } => !enabled.contains(stage),
            })
            .map(|(id, _, _)| id.clone())
            .collect();
        v.sort();
        v
    }
}

pub const DUMPS: [&str; 2] = ["CC-MAIN-2024-10", "CC-MAIN-2024-18"];
pub const BLOCKED_HOST: &str = "casino-winner.example";

/// The 100-document fixture crawl. Each document is built to survive, or to
/// be dropped by one specific rule; the fate is recorded alongside.
pub fn fixture_crawl(dir: &Path) -> FixtureCrawl {
    let mut r = rng(2024);
    struct Doc {
        n: usize,
        dump: usize,
        host: String,
        html: String,
        fate: Fate,
    }
    let mut docs: Vec<Doc> = Vec::new();
    let drop = |stage, rule| Fate::Dropped { stage, rule };
    let mut originals: Vec<(usize, usize, Vec<String>)> = Vec::new();

    for i in 0..45 {
        let n = r.gen_range(6..=10);
        let mut paras = prose_lines(&mut r, Lang::En, n);
        if i >= 40 {
            paras[2] = format!(
                "Write to editor{i}@newsroom-example.org or visit 8.8.{i}.4 for the full archive of this story."
            );
        }
        if i < 10 {
            originals.push((i, i % 2, paras.clone()));
        }
        docs.push(Doc {
            n: i,
            dump: i % 2,
            host: format!("site{i}.example.com"),
            html: html_page("Story", &paras, true),
            fate: Fate::Kept,
        });
    }
    // Near copies of the first ten articles: one extra sentence at the end.
    for (k, (i, dump, paras)) in originals.iter().enumerate() {
        let mut p = paras.clone();
        let last = p.len() - 1;
        p[last] += " Thanks for reading.";
        docs.push(Doc {
            n: 100 + k,
            dump: *dump,
            host: format!("mirror{i}.example.net"),
            html: html_page("Copy", &p, true),
            fate: drop("dedup", "minhash_duplicate"),
        });
    }
    for k in 0..5 {
        let paras = prose_lines(&mut r, Lang::En, 6);
        docs.push(Doc {
            n: 200 + k,
            dump: k % 2,
            host: BLOCKED_HOST.into(),
            html: html_page("Win", &paras, true),
            fate: drop("url", "blocklist_domain"),
        });
    }
    for k in 0..5 {
        let html =
            "<html><head><title>Menu</title></head><body><nav><a href=\"/a\">Alpha</a> <a href=\"/b\">Beta</a></nav>\
                    <script>var tracking = true;</script><footer>All rights reserved.</footer></body></html>";
        docs.push(Doc {
            n: 300 + k,
            dump: k % 2,
            host: format!("empty{k}.example.org"),
            html: html.into(),
            fate: drop("extract", "empty"),
        });
    }
    for k in 0..10 {
        let paras = prose_lines(&mut r, Lang::De, 8);
        docs.push(Doc {
            n: 400 + k,
            dump: k % 2,
            host: format!("seite{k}.example.de"),
            html: html_page("Artikel", &paras, true),
            fate: drop("language", "language_score"),
        });
    }
    for k in 0..5 {
        let paras: Vec<String> = (0..3).map(|_| sentence(&mut r, Lang::En, 8, 10)).collect();
        docs.push(Doc {
            n: 500 + k,
            dump: k % 2,
            host: format!("short{k}.example.com"),
            html: html_page("Brief", &paras, true),
            fate: drop("gopher_quality", "min_words"),
        });
    }
    for k in 0..5 {
        let mut paras = prose_lines(&mut r, Lang::En, 7);
        let repeated = paras[1].clone();
        paras.extend(std::iter::repeat(repeated).take(4));
        docs.push(Doc {
            n: 600 + k,
            dump: k % 2,
            host: format!("echo{k}.example.com"),
            html: html_page("Echo", &paras, true),
            fate: drop("gopher_repetition", "dup_line_frac"),
        });
    }
    for k in 0..5 {
        let mut paras = prose_lines(&mut r, Lang::En, 7);
        let (rule, line) = if k < 2 {
            (
                "lorem_ipsum",
                "Lorem ipsum dolor sit amet, consectetur adipiscing elit, sed do eiusmod tempor.".to_string(),
            )
        } else {
            ("curly_bracket", format!("Set the value to {{x{k}}} before the engine of the machine starts."))
        };
        paras.insert(3, line);
        docs.push(Doc {
            n: 700 + k,
            dump: k % 2,
            host: format!("draft{k}.example.com"),
            html: html_page("Draft", &paras, true),
            fate: drop("c4", rule),
        });
    }
    for k in 0..5 {
        // Long enough for the word-count rules, too few sentences for C4.
        let paras: Vec<String> = (0..4).map(|_| sentence(&mut r, Lang::En, 14, 16)).collect();
        docs.push(Doc {
            n: 750 + k,
            dump: k % 2,
            host: format!("terse{k}.example.com"),
            html: html_page("Terse", &paras, true),
            fate: drop("c4", "min_sentences"),
        });
    }
    for k in 0..5 {
        let paras: Vec<String> = if k < 3 {
            // Mostly short lines.
            let mut p: Vec<String> = (0..20).map(|_| sentence(&mut r, Lang::En, 3, 4)).collect();
            p.extend(prose_lines(&mut r, Lang::En, 5));
            p
        } else {
            // Lines that never end in punctuation.
            (0..7)
                .map(|_| {
                    let a = sentence(&mut r, Lang::En, 8, 12);
                    let b = sentence(&mut r, Lang::En, 8, 12);
                    format!("{a} {b} {}", words(&mut r, Lang::En, 4).join(" "))
                })
                .collect()
        };
        let rule = if k < 3 { "short_line_ratio" } else { "line_punct_ratio" };
        docs.push(Doc {
            n: 800 + k,
            dump: k % 2,
            host: format!("list{k}.example.com"),
            html: html_page("List", &paras, true),
            fate: drop("fineweb_custom", rule),
        });
    }
    assert_eq!(docs.len(), 100);

    fs::create_dir_all(dir).unwrap();
    let mut warcs = Vec::new();
    for (d, dump) in DUMPS.iter().enumerate() {
        let path = dir.join(format!("{dump}-fixture-00000.warc.gz"));
        let mut w = WarcWriter::new(fs::File::create(&path).unwrap(), true);
        let info = RawRecord::new(
            "warcinfo",
            &format!("<urn:uuid:info-{d}>"),
            "2024-03-01T00:00:00Z",
            None,
            vec![],
            format!("isPartOf: {dump}\r\n").into_bytes(),
        );
        w.write_record(&info).unwrap();
        for doc in docs.iter().filter(|x| x.dump == d) {
            let url = format!("https://{}/articles/{}", doc.host, doc.n);
            let req = RawRecord::new(
                "request",
                &format!("<urn:uuid:req-{}>", doc.n),
                "2024-03-01T00:00:00Z",
                Some(&url),
                vec![],
                b"GET / HTTP/1.1\r\n\r\n".to_vec(),
            );
            w.write_record(&req).unwrap();
            let rec = RawRecord::new(
                "response",
                &record_id(doc.n),
                "2024-03-01T12:00:00Z",
                Some(&url),
                vec![],
                http_response(&doc.html),
            );
            w.write_record(&rec).unwrap();
        }
        w.into_inner().flush().unwrap();
        warcs.push(path);
    }

    let blocklist = dir.join("blocklist.txt");
    fs::write(&blocklist, format!("# fixture\ndomain:{BLOCKED_HOST}\npattern:/phishing/\n")).unwrap();
    let model = dir.join("lid.bin");
    let (m, _) = train_toy_lid(11);
    m.write_to(std::io::BufWriter::new(fs::File::create(&model).unwrap())).unwrap();

    FixtureCrawl {
        dir: dir.to_path_buf(),
        warcs,
        blocklist,
        model,
        docs: docs.into_iter().map(|d| (record_id(d.n), DUMPS[d.dump].to_string(), d.fate)).collect(),
    }
}
