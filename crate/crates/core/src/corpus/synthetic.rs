//! Seeded synthetic corpora with exact gold boundaries.
//!
//! Each file is a preamble template, a word-salad body and (optionally) an
//! epilogue template. Template lines are copied verbatim except that each
//! non-trivial line is, with the mutation rate, turned into a unique variant
//! by appending a salt token. Body lines always carry a salt token, so they
//! never repeat anywhere in the corpus.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::CorpusError;
use crate::detector::BoundaryReport;
use crate::preprocess::{canonicalize, encode_latin1, is_trivial, DEFAULT_MIN_LEN};

/// Template text, one entry per raw line. `{title}`, `{TITLE}`, `{author}`,
/// `{number}` and `{date}` are filled in per file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub lines: Vec<String>,
}

impl Template {
    pub fn new(text: &str) -> Self {
        Template {
            lines: text.lines().map(str::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub files: usize,
    pub preambles: Vec<Template>,
    pub epilogues: Vec<Template>,
    pub mutation_rate: f64,
    pub epilogue_probability: f64,
    /// Inclusive range of body length in raw lines.
    pub body_lines: (usize, usize),
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            files: 500,
            preambles: default_preambles(),
            epilogues: default_epilogues(),
            mutation_rate: 0.25,
            epilogue_probability: 0.9,
            body_lines: (400, 1200),
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::Config(m.to_string()));
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.epilogue_probability) {
            return bad("epilogue probability must lie in [0, 1]");
        }
        if self.preambles.is_empty() {
            return bad("at least one preamble template is required");
        }
        if self.epilogues.is_empty() && self.epilogue_probability > 0.0 {
            return bad("epilogue probability is positive but no epilogue template was given");
        }
        if self.body_lines.0 == 0 || self.body_lines.0 > self.body_lines.1 {
            return bad("body length range must be non-empty and start at 1 or more");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticFile {
    pub id: String,
    pub bytes: Vec<u8>,
    pub preamble_variant: usize,
    pub epilogue_variant: Option<usize>,
    /// Non-trivial template lines emitted.
    pub template_lines: usize,
    /// How many of those were mutated.
    pub mutated_lines: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub files: Vec<SyntheticFile>,
    pub gold: Vec<BoundaryReport>,
}

const WORDS: &[&str] = &[
    "river", "lantern", "quiet", "harbor", "meadow", "silver", "winter", "orchard", "letter",
    "candle", "distant", "garden", "window", "morning", "thunder", "valley", "shadow", "kettle",
    "bridge", "copper", "willow", "stone", "whisper", "market", "evening", "forest", "journey",
    "mirror", "pocket", "ribbon", "sailor", "tower", "velvet", "wander", "yellow", "anchor",
    "basket", "cellar", "dancer", "ember", "feather", "gravel", "hollow", "island", "jacket",
    "kingdom", "ladder", "marble", "needle", "ocean", "pepper", "quarrel", "rabbit", "saddle",
    "timber", "umbrella", "village", "wagon", "harvest", "the", "and", "of", "a", "to", "in",
    "was", "he", "she", "with", "his", "her", "that", "it", "for", "on", "had", "by", "at",
    "from", "they", "were", "said", "upon", "would", "could", "little", "old", "long", "great",
    "before", "after", "again", "never", "always", "slowly", "suddenly", "gently", "across",
];

const ADJECTIVES: &[&str] = &[
    "Silent", "Crimson", "Hidden", "Last", "Golden", "Broken", "Northern", "Forgotten", "Wild",
    "Lonely", "Ancient", "Secret",
];

const NOUNS: &[&str] = &[
    "Garden", "Voyage", "Letters", "Orchard", "Kingdom", "Harbor", "Tower", "Island", "Lantern",
    "River", "Mirror", "Bridge",
];

const SURNAMES: &[&str] = &[
    "Ashford", "Bellamy", "Carrow", "Dunmore", "Ellery", "Fairweather", "Grayson", "Hollis",
    "Ingram", "Jessop", "Kendrick", "Lowell",
];

const GIVEN: &[&str] = &["Anne", "Thomas", "Margaret", "Henry", "Eliza", "Walter", "Clara", "James"];

const MONTHS: &[&str] = &[
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

/// Letters-only token, unique per `(prefix, n)`. Prefixes do not begin any
/// word in the word lists, so salted lines cannot collide with each other.
fn salt(prefix: &str, mut n: u64) -> String {
    let mut s = String::from(prefix);
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

struct FileContext {
    title: String,
    author: String,
    number: u64,
    date: String,
}

impl FileContext {
    fn fill(&self, line: &str) -> String {
        line.replace("{title}", &self.title)
            .replace("{TITLE}", &self.title.to_uppercase())
            .replace("{author}", &self.author)
            .replace("{number}", &self.number.to_string())
            .replace("{date}", &self.date)
    }
}

struct Builder<'a> {
    lines: Vec<String>,
    rng: ChaCha8Rng,
    rate: f64,
    file: u64,
    salts: u64,
    template_lines: usize,
    mutated_lines: usize,
    ctx: &'a FileContext,
}

impl Builder<'_> {
    fn next_salt(&mut self, prefix: &str) -> String {
        self.salts += 1;
        salt(prefix, self.file * 1_000_003 + self.salts)
    }

    /// Emits a template; returns the raw indices of its first and last
    /// non-trivial lines.
    fn template(&mut self, t: &Template) -> (Option<usize>, Option<usize>) {
        let mut first = None;
        let mut last = None;
        for line in &t.lines {
            let mut text = self.ctx.fill(line);
            if !is_trivial(&canonicalize(&text), DEFAULT_MIN_LEN) {
                self.template_lines += 1;
                if self.rng.gen_bool(self.rate) {
                    self.mutated_lines += 1;
                    let s = self.next_salt("xj");
                    text.push(' ');
                    text.push_str(&s);
                }
                first.get_or_insert(self.lines.len());
                last = Some(self.lines.len());
            }
            self.lines.push(text);
        }
        (first, last)
    }

    fn body(&mut self, target: usize) {
        let start = self.lines.len();
        let mut chapter = 1;
        while self.lines.len() - start < target {
            if self.rng.gen_bool(0.05) {
                self.lines.push(format!("CHAPTER {chapter}."));
                self.lines.push(String::new());
                chapter += 1;
            }
            let para = self.rng.gen_range(2..=8);
            for _ in 0..para {
                let line = self.body_line();
                self.lines.push(line);
            }
            self.lines.push(String::new());
        }
    }

    fn body_line(&mut self) -> String {
        let n = self.rng.gen_range(7..=11);
        let mut words: Vec<String> = (0..n)
            .map(|_| WORDS.choose(&mut self.rng).unwrap().to_string())
            .collect();
        let pos = self.rng.gen_range(0..=words.len());
        let s = self.next_salt("qz");
        words.insert(pos, s);
        let mut line = words.join(" ");
        if let Some(c) = line.get_mut(0..1) {
            c.make_ascii_uppercase();
        }
        line.push('.');
        line
    }
}

fn file_id(i: usize) -> String {
    format!("etext{:02}/{:05}.txt", i / 100, i)
}

fn generate_file(spec: &SyntheticSpec, i: usize) -> (SyntheticFile, BoundaryReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(i as u64);
    let ctx = FileContext {
        title: format!(
            "The {} {}",
            ADJECTIVES.choose(&mut rng).unwrap(),
            NOUNS.choose(&mut rng).unwrap()
        ),
        author: format!("{} {}", GIVEN.choose(&mut rng).unwrap(), SURNAMES.choose(&mut rng).unwrap()),
        number: 10_000 + i as u64,
        date: format!(
            "{} {}, {}",
            MONTHS.choose(&mut rng).unwrap(),
            rng.gen_range(1..=28),
            rng.gen_range(1994..=2008)
        ),
    };
    let preamble_variant = i % spec.preambles.len();
    let with_epilogue = spec.epilogue_probability > 0.0 && rng.gen_bool(spec.epilogue_probability);
    let epilogue_variant = with_epilogue.then(|| (i / spec.preambles.len()) % spec.epilogues.len());
    let body_len = rng.gen_range(spec.body_lines.0..=spec.body_lines.1);

    let mut b = Builder {
        lines: Vec::new(),
        rng,
        rate: spec.mutation_rate,
        file: i as u64,
        salts: 0,
        template_lines: 0,
        mutated_lines: 0,
        ctx: &ctx,
    };
    let (_, preamble_end) = b.template(&spec.preambles[preamble_variant]);
    b.lines.extend([String::new(), String::new()]);
    b.body(body_len);
    let epilogue_start = match epilogue_variant {
        Some(v) => {
            b.lines.extend([String::new(), String::new()]);
            b.template(&spec.epilogues[v]).0
        }
        None => None,
    };

    let eol = if i % 7 == 3 { "\r\n" } else { "\n" };
    let mut text = b.lines.join(eol);
    text.push_str(eol);
    let id = file_id(i);
    let gold = BoundaryReport::new(id.clone(), preamble_end, epilogue_start);
    let file = SyntheticFile {
        id,
        bytes: encode_latin1(&text),
        preamble_variant,
        epilogue_variant,
        template_lines: b.template_lines,
        mutated_lines: b.mutated_lines,
    };
    (file, gold)
}

/// Builds the corpus in memory. Output depends only on `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus, CorpusError> {
    spec.validate()?;
    let (files, gold) = (0..spec.files)
        .into_par_iter()
        .map(|i| generate_file(spec, i))
        .unzip();
    Ok(SyntheticCorpus { files, gold })
}

/// Writes each file under `dir`, creating subdirectories as needed.
pub fn write_synthetic(corpus: &SyntheticCorpus, dir: &Path) -> Result<(), CorpusError> {
    for f in &corpus.files {
        let path = dir.join(&f.id);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CorpusError::io(parent, e))?;
        }
        fs::write(&path, &f.bytes).map_err(|e| CorpusError::io(&path, e))?;
    }
    Ok(())
}

/// A spool of `n` lines with a skewed repetition profile: a fixed pool of
/// boilerplate lines drawn with Zipf(1) weights, occasional repeats of
/// recent body lines, and otherwise fresh unique lines.
pub fn synthetic_spool(n: usize, seed: u64) -> Vec<String> {
    const POOL: usize = 5000;
    const HISTORY: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<String> = (0..POOL as u64)
        .map(|k| format!("{} notice {} applies to every copy distributed", salt("bp", k), k % 97))
        .collect();
    let mut cumulative = Vec::with_capacity(POOL);
    let mut acc = 0.0;
    for r in 0..POOL {
        acc += 1.0 / (r + 1) as f64;
        cumulative.push(acc);
    }
    let mut history: Vec<usize> = Vec::with_capacity(HISTORY);
    let mut body: Vec<String> = Vec::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        if u < 0.35 {
            let x = rng.gen::<f64>() * acc;
            let r = cumulative.partition_point(|&c| c < x).min(POOL - 1);
            out.push(pool[r].clone());
        } else if u < 0.5 && !history.is_empty() {
            let j = history[rng.gen_range(0..history.len())];
            out.push(body[j].clone());
        } else {
            let words: Vec<&str> = (0..8).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
            let line = format!("{} {}", salt("qz", body.len() as u64), words.join(" "));
            if history.len() == HISTORY {
                history.remove(0);
            }
            history.push(body.len());
            body.push(line.clone());
            out.push(line);
        }
    }
    out
}

pub fn default_preambles() -> Vec<Template> {
    vec![
        Template::new(
            "The Project Gutenberg EBook of {title}, by {author}

Title: {title}

Author: {author}

Release Date: {date} [EBook #{number}]

Language: English

Character set encoding: ISO-8859-1

This eBook is for the use of anyone anywhere at no cost and with
almost no restrictions whatsoever.  You may copy it, give it away or
re-use it under the terms of the Project Gutenberg License included
with this eBook or online at www.gutenberg.org

*** START OF THIS PROJECT GUTENBERG EBOOK ***",
        ),
        Template::new(
            "The Project Gutenberg Etext of {title}, by {author}

Copyright laws are changing all over the world, be sure to check
the copyright laws for your country before posting these files!!

Please take a look at the important information in this header.
We encourage you to keep this file on your own disk, keeping an
electronic path open for the next readers.  Do not remove this.


**Welcome To The World of Free Plain Vanilla Electronic Texts**

**Etexts Readable By Both Humans and By Computers, Since 1971**

*These Etexts Prepared By Hundreds of Volunteers and Donations*

Information on contacting Project Gutenberg to get Etexts, and
further information is included below.  We need your donations.


{title}

by {author}

{date} [Etext #{number}]


The Project Gutenberg Etext of {title}, by {author}
******This file should be named {number}.txt or {number}.zip******

Project Gutenberg Etexts are usually created from multiple editions,
all of which are in the Public Domain in the United States, unless a
copyright notice is included.  Therefore, we usually do NOT keep these
books in compliance with any particular paper edition.

We are now trying to release all our books one month in advance
of the official release dates, leaving time for better editing.

Please note:  neither this list nor its contents are final till
midnight of the last day of the month of any such announcement.
The official release date of all Project Gutenberg Etexts is at
Midnight, Central Time, of the last day of the stated month.  A
preliminary version may often be posted for suggestion, comment
and editing by those who wish to do so.

**The Legal Small Print**

(Three Pages)

***START**THE SMALL PRINT!**FOR PUBLIC DOMAIN ETEXTS**START***
Why is this \"Small Print!\" statement here?  You know: lawyers.
They tell us you might sue us if there is something wrong with
your copy of this etext, even if you got it for free from someone
other than us, and even if what's wrong is not our fault.  So,
among other things, this \"Small Print!\" statement disclaims most
of our liability to you.  It also tells you how you can distribute
copies of this etext if you want to.

*BEFORE!* YOU USE OR READ THIS ETEXT
By using or reading any part of this PROJECT GUTENBERG-tm etext,
you indicate that you understand, agree to and accept this
\"Small Print!\" statement.  If you do not, you can receive a
refund of the money (if any) you paid for this etext by sending
a request within 30 days of receiving it to the person you got
it from.

LIMITED WARRANTY; DISCLAIMER OF DAMAGES
But for the \"Right of Replacement or Refund\" described below,
the Project and any other party distributing this etext as a
PROJECT GUTENBERG-tm etext disclaims all liability to you for
damages, costs and expenses, including legal fees.

*END THE SMALL PRINT! FOR PUBLIC DOMAIN ETEXTS*Ver.04.29.93*END*",
        ),
        Template::new(
            "Project Gutenberg's {title}, by {author}

Title: {title}

Author: {author}

Release Date: {date} [EBook #{number}]

Language: English

This eBook is for the use of anyone anywhere at no cost and with
almost no restrictions whatsoever.  You may copy it, give it away or
re-use it under the terms of the Project Gutenberg License included
with this eBook or online at www.gutenberg.net

*** START OF THE PROJECT GUTENBERG EBOOK {TITLE} ***


Produced by volunteers of the Online Distributed Proofreading Team
at http://www.pgdp.net from page images generously made available
by the Internet Archive and the University of Michigan Libraries.",
        ),
    ]
}

pub fn default_epilogues() -> Vec<Template> {
    vec![
        Template::new(
            "End of the Project Gutenberg EBook of {title}, by {author}

*** END OF THIS PROJECT GUTENBERG EBOOK {TITLE} ***

Updated editions will replace the previous one--the old editions
will be renamed.

Creating the works from public domain print editions means that no
one owns a United States copyright in these works, so the Foundation
(and you!) can copy and distribute it in the United States without
permission and without paying copyright royalties.  Special rules,
set forth in the General Terms of Use part of this license, apply to
copying and distributing Project Gutenberg-tm electronic works to
protect the PROJECT GUTENBERG-tm concept and trademark.  Project
Gutenberg is a registered trademark, and may not be used if you
charge for the eBooks, unless you receive specific permission.

***** This file should be named {number}.txt or {number}.zip *****
This and all associated files of various formats will be found in:
        http://www.gutenberg.org/{number}/

*** START: FULL LICENSE ***

THE FULL PROJECT GUTENBERG LICENSE
PLEASE READ THIS BEFORE YOU DISTRIBUTE OR USE THIS WORK

To protect the Project Gutenberg-tm mission of promoting the free
distribution of electronic works, by using or distributing this work
(or any other work associated in any way with the phrase \"Project
Gutenberg\"), you agree to comply with all the terms of the Full Project
Gutenberg-tm License (available with this file or online at
http://gutenberg.org/license).

Section 1.  General Terms of Use and Redistributing Project Gutenberg-tm
electronic works

1.A.  By reading or using any part of this Project Gutenberg-tm
electronic work, you indicate that you have read, understand, agree to
and accept all the terms of this license and intellectual property
(trademark/copyright) agreement.  If you do not agree to abide by all
the terms of this agreement, you must cease using and return or destroy
all copies of Project Gutenberg-tm electronic works in your possession.

Most people start at our Web site which has the main PG search facility:

     http://www.gutenberg.org

This Web site includes information about Project Gutenberg-tm,
including how to make donations to the Project Gutenberg Literary
Archive Foundation, how to help produce our new eBooks, and how to
subscribe to our email newsletter to hear about new eBooks.",
        ),
        Template::new(
            "End of Project Gutenberg's {title}, by {author}

*** END OF THE PROJECT GUTENBERG EBOOK {TITLE} ***

Project Gutenberg eBooks are often created from several printed
editions, all of which are confirmed as Public Domain in the US
unless a copyright notice is included.  Thus, we usually do not
keep eBooks in compliance with any particular paper edition.

This file should be named {number}.txt or {number}.zip
Corrected EDITIONS of our eBooks get a new NUMBER, {number}1.txt
VERSIONS based on separate sources get new LETTER, {number}a.txt

We are now trying to release all our eBooks one year in advance
of the official release dates, leaving time for better editing.
Please be encouraged to tell us about any error or corrections,
even years after the official publication date.

Please note neither this list nor its contents are final till
midnight of the last day of the month of any such announcement.

Most people start at our Web sites at:
http://gutenberg.net or
http://promo.net/pg",
        ),
    ]
}
