//! Seeded generators for the synthetic corpora and datasets under `data/`.
//!
//! Everything here is a pure function of its seed, so the committed files can
//! be checked against a fresh generation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sgdst_core::corpus::{Action, Dialogue, Frame, FrameState, SpanAnnotation, Speaker, Turn};
use sgdst_core::numerals::number_to_words;
use sgdst_core::schema::{IntentDef, Schema, ServiceDef, SlotDef};
use sgdst_core::augment::{build_lexicon, CachedProvider, ExpansionProvider, ProviderKind, DEFAULT_K};
use sgdst_core::tracker::ResetRule;
use sgdst_core::DONTCARE;

pub const ORACLE_SEED: u64 = 20;
pub const TRAIN_SEED: u64 = 50;
pub const MRC_SEED: u64 = 200;
pub const WD_SEED: u64 = 99;
pub const ABLATION_SEED: u64 = 5;
pub const MRC_MARKER: &str = "zqmark";

pub fn schema() -> Schema {
    let nums: Vec<String> = (1..=6).map(|n| n.to_string()).collect();
    let nums: Vec<&str> = nums.iter().map(String::as_str).collect();
    Schema::new(vec![
        ServiceDef::new(
            "Restaurants_1",
            "Search for restaurants and reserve tables",
            vec![
                SlotDef::new("city", "City where the restaurant is located", &[]),
                SlotDef::new("restaurant_name", "Name of the restaurant", &[]),
                SlotDef::new("time", "Tentative time of the reservation", &[]),
                SlotDef::new("address", "Street address of the restaurant", &[]),
                SlotDef::new("party_size", "Number of people in the reservation", &nums),
                SlotDef::new("cuisine", "Cuisine of the food served", &["Italian", "Mexican", "Chinese", "Indian"]),
                SlotDef::new("has_live_music", "Whether the restaurant has live music", &["True", "False"]),
            ],
            vec![
                IntentDef::new("FindRestaurants", "Find a restaurant to eat at", &["city", "cuisine"], &["has_live_music"]),
                IntentDef::new(
                    "ReserveRestaurant",
                    "Reserve a table at a restaurant",
                    &["restaurant_name", "city", "time"],
                    &["party_size"],
                ),
            ],
        ),
        ServiceDef::new(
            "Events_1",
            "Find cultural events and buy tickets",
            vec![
                SlotDef::new("event_type", "Type of cultural event", &["Music", "Theater", "Sports"]),
                SlotDef::new("city", "City where the event is taking place", &[]),
                SlotDef::new("event_name", "Name of the event", &[]),
                SlotDef::new("date", "Date of the event", &[]),
                SlotDef::new("number_of_tickets", "Number of tickets to buy", &nums),
                SlotDef::new("free_entry", "Whether entrance to the event is free", &["True", "False"]),
            ],
            vec![
                IntentDef::new("FindEvents", "Find cultural events", &["event_type", "city"], &["date"]),
                IntentDef::new(
                    "BuyEventTickets",
                    "Buy tickets for an event",
                    &["event_name", "date", "number_of_tickets"],
                    &["city"],
                ),
            ],
        ),
        ServiceDef::new(
            "Payment_1",
            "Send and request money",
            vec![
                SlotDef::new("amount", "Amount of money to transfer or request", &[]),
                SlotDef::new("receiver", "Name of the contact or account", &[]),
                SlotDef::new(
                    "payment_method",
                    "Source of money used for the payment",
                    &["app balance", "debit card", "credit card"],
                ),
                SlotDef::new("private_visibility", "Whether the transaction is private", &["True", "False"]),
            ],
            vec![
                IntentDef::new("RequestPayment", "Request money from a contact", &["receiver", "amount"], &[]),
                IntentDef::new(
                    "MakePayment",
                    "Send money to a contact",
                    &["payment_method", "amount", "receiver"],
                    &["private_visibility"],
                ),
            ],
        ),
    ])
    .expect("synthetic schema is valid")
}

const CITIES: &[&str] = &["San Jose", "Berkeley", "Palo Alto", "Sacramento", "Fresno", "Oakland", "Napa", "Davis"];
const RESTAURANTS: &[&str] =
    &["Golden Bowl", "Casa Roja", "Spice Route", "Trattoria Sole", "Lotus Garden", "Blue Agave", "Curry Leaf"];
const STREETS: &[&str] = &["Main Street", "Oak Avenue", "Pine Road", "Market Street", "Lake Drive"];
const EVENTS: &[&str] = &["Hamilton", "Jazz Night", "Giants Game", "Blue Note Live", "Swan Lake", "Derby Day"];
const MONTHS: &[&str] = &["March", "April", "May", "June", "July"];
const PEOPLE: &[&str] = &["Amy", "Bob", "Carla", "Diego", "Emma", "Farid", "Grace"];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("non-empty")
}

fn count_text(rng: &mut ChaCha8Rng, n: u32) -> String {
    if rng.gen_bool(0.5) {
        number_to_words(n).expect("small number")
    } else {
        n.to_string()
    }
}

fn state(intent: &str, values: &BTreeMap<&str, String>, requested: &[&str]) -> FrameState {
    FrameState {
        active_intent: intent.into(),
        requested_slots: requested.iter().map(|s| (*s).into()).collect(),
        slot_values: values.iter().map(|(k, v)| ((*k).to_string(), vec![v.clone()])).collect(),
    }
}

fn act(name: &str, slot: Option<&str>, values: &[&str]) -> Action {
    Action::new(name, slot, values)
}

struct Builder<'s> {
    schema: &'s Schema,
    turns: Vec<Turn>,
}

impl<'s> Builder<'s> {
    fn new(schema: &'s Schema) -> Self {
        Builder { schema, turns: Vec::new() }
    }

    /// Char spans of non-categorical values mentioned in the utterance.
    fn spans(&self, service: &str, utterance: &str, values: &[(String, String)]) -> Vec<SpanAnnotation> {
        let svc = self.schema.service(service).expect("known service");
        let mut out = Vec::new();
        for (slot, value) in values {
            let Some(def) = svc.slot(slot) else { continue };
            if def.is_categorical || value == DONTCARE {
                continue;
            }
            if let Some(r) = sgdst_core::text::find_word_occurrences(utterance, value).first() {
                out.push(SpanAnnotation {
                    slot: slot.clone(),
                    start_char: sgdst_core::text::byte_to_char(utterance, r.start),
                    end_char: sgdst_core::text::byte_to_char(utterance, r.end),
                });
            }
        }
        out
    }

    fn frame(&self, service: &str, utterance: &str, state: Option<FrameState>, actions: Vec<Action>) -> Frame {
        let mut values: Vec<(String, String)> = Vec::new();
        for a in &actions {
            if let Some(slot) = &a.slot {
                values.extend(a.values.iter().map(|v| (slot.clone(), v.clone())));
            }
        }
        if let Some(s) = &state {
            for (k, v) in &s.slot_values {
                values.extend(v.iter().map(|x| (k.clone(), x.clone())));
            }
        }
        Frame {
            service: service.into(),
            span_annotations: self.spans(service, utterance, &values),
            state,
            actions,
            extra: Default::default(),
        }
    }

    fn user(&mut self, utterance: &str, frames: Vec<(&str, FrameState, Vec<Action>)>) {
        let frames = frames
            .into_iter()
            .map(|(svc, st, acts)| self.frame(svc, utterance, Some(st), acts))
            .collect();
        self.turns.push(Turn { speaker: Speaker::User, utterance: utterance.into(), frames, extra: Default::default() });
    }

    fn system(&mut self, utterance: &str, service: &str, actions: Vec<Action>) {
        let frame = self.frame(service, utterance, None, actions);
        self.turns.push(Turn {
            speaker: Speaker::System,
            utterance: utterance.into(),
            frames: vec![frame],
            extra: Default::default(),
        });
    }

    fn finish(self, id: String, services: &[&str]) -> Dialogue {
        Dialogue {
            dialogue_id: id,
            services: services.iter().map(|s| (*s).into()).collect(),
            turns: self.turns,
            extra: Default::default(),
        }
    }
}

fn restaurant_turns(b: &mut Builder<'_>, rng: &mut ChaCha8Rng) {
    const S: &str = "Restaurants_1";
    let city = pick(rng, CITIES);
    let cuisine = pick(rng, &["Italian", "Mexican", "Chinese", "Indian"]);
    let name = pick(rng, RESTAURANTS);
    let hour: u32 = rng.gen_range(5..=9);
    let minutes = pick(rng, &["00", "15", "30", "45"]);
    let time = format!("{hour}:{minutes} pm");
    let party: u32 = loop {
        let p = rng.gen_range(1..=6);
        if p != hour {
            break p;
        }
    };
    let music = rng.gen_bool(0.5);
    let any_cuisine = rng.gen_bool(0.2);

    let mut v: BTreeMap<&str, String> = BTreeMap::new();
    v.insert("city", city.into());
    let opening = if any_cuisine {
        v.insert("cuisine", DONTCARE.into());
        format!("I want to eat out in {city}, any cuisine is fine.")
    } else {
        v.insert("cuisine", cuisine.into());
        match rng.gen_range(0..3) {
            0 => format!("I'm looking for a {} restaurant in {city}.", cuisine.to_lowercase()),
            1 => format!("Find me somewhere serving {cuisine} food in {city}."),
            _ => format!("Can you search for {cuisine} restaurants in {city}?"),
        }
    };
    b.user(
        &opening,
        vec![(S, state("FindRestaurants", &v, &[]), vec![act("INFORM", Some("city"), &[city]), act("INFORM_INTENT", None, &["FindRestaurants"])])],
    );
    b.system("Would you like a place with live music?", S, vec![act("REQUEST", Some("has_live_music"), &[])]);
    let music_reply = if music { "Yes, live music would be great." } else { "No, I don't need live music." };
    v.insert("has_live_music", if music { "True" } else { "False" }.into());
    b.user(music_reply, vec![(S, state("FindRestaurants", &v, &[]), vec![])]);
    let offer = format!("How about {name}? It is a nice place in {city}.");
    b.system(&offer, S, vec![act("OFFER", Some("restaurant_name"), &[name]), act("OFFER", Some("city"), &[city])]);

    let size = count_text(rng, party);
    v.insert("restaurant_name", name.into());
    v.insert("time", time.clone());
    v.insert("party_size", party.to_string());
    let book = match rng.gen_range(0..2) {
        0 => format!("That sounds good. Book a table for {size} at {time}."),
        _ => format!("Great, please reserve it for {size} people at {time}."),
    };
    b.user(
        &book,
        vec![(S, state("ReserveRestaurant", &v, &[]), vec![act("INFORM", Some("time"), &[&time]), act("INFORM_INTENT", None, &["ReserveRestaurant"])])],
    );
    let party_s = party.to_string();
    b.system(
        &format!("Please confirm: a table for {party} at {name} at {time}."),
        S,
        vec![
            act("CONFIRM", Some("party_size"), &[&party_s]),
            act("CONFIRM", Some("restaurant_name"), &[name]),
            act("CONFIRM", Some("time"), &[&time]),
        ],
    );
    b.user("Yes, that works. What is their address?", vec![(S, state("ReserveRestaurant", &v, &["address"]), vec![act("AFFIRM", None, &[])])]);
    let street = format!("{} {}", rng.gen_range(100..999), pick(rng, STREETS));
    b.system(&format!("Your table is booked. The address is {street}."), S, vec![act("INFORM", Some("address"), &[&street])]);
}

fn event_turns(b: &mut Builder<'_>, rng: &mut ChaCha8Rng, with_restaurant_city: Option<&str>) {
    const S: &str = "Events_1";
    let kind = pick(rng, &["Music", "Theater", "Sports"]);
    let city = with_restaurant_city.unwrap_or_else(|| pick(rng, CITIES));
    let name = pick(rng, EVENTS);
    let date = format!("{} {}", pick(rng, MONTHS), rng.gen_range(10..=28));
    let tickets: u32 = rng.gen_range(1..=6);
    let free = rng.gen_bool(0.5);

    let mut v: BTreeMap<&str, String> = BTreeMap::new();
    v.insert("event_type", kind.into());
    v.insert("city", city.into());
    let word = match kind {
        "Music" => pick(rng, &["music", "concert"]),
        "Theater" => pick(rng, &["theater", "broadway"]),
        _ => pick(rng, &["sports", "game"]),
    };
    let opening = match rng.gen_range(0..2) {
        0 => format!("Are there any {word} events in {city}?"),
        _ => format!("I'd like to find a {word} event in {city}."),
    };
    b.user(&opening, vec![(S, state("FindEvents", &v, &[]), vec![act("INFORM", Some("city"), &[city])])]);
    b.system(
        &format!("There is {name} on {date} in {city}."),
        S,
        vec![act("OFFER", Some("event_name"), &[name]), act("OFFER", Some("date"), &[&date])],
    );
    b.user("Is the entrance free?", vec![(S, state("FindEvents", &v, &["free_entry"]), vec![act("REQUEST", Some("free_entry"), &[])])]);
    let free_s = if free { "True" } else { "False" };
    let answer = if free { "Yes, entrance is free." } else { "No, tickets are required." };
    b.system(answer, S, vec![act("INFORM", Some("free_entry"), &[free_s])]);
    v.insert("event_name", name.into());
    v.insert("date", date.clone());
    v.insert("number_of_tickets", tickets.to_string());
    let n = count_text(rng, tickets);
    b.user(
        &format!("Great, buy {n} tickets for {name} please."),
        vec![(S, state("BuyEventTickets", &v, &[]), vec![act("INFORM_INTENT", None, &["BuyEventTickets"])])],
    );
    b.system("Your tickets are booked.", S, vec![act("NOTIFY_SUCCESS", None, &[])]);
}

/// Request money, then switch to sending a different amount. The state after
/// the switch holds only what was said since.
fn payment_turns(b: &mut Builder<'_>, rng: &mut ChaCha8Rng) {
    const S: &str = "Payment_1";
    let first: u32 = rng.gen_range(3..=9) * 10;
    let second: u32 = loop {
        let s = rng.gen_range(1..=9) * 5;
        if s != first {
            break s;
        }
    };
    let from = pick(rng, PEOPLE);
    let to = pick(rng, PEOPLE);
    let method = pick(rng, &["app balance", "debit card", "credit card"]);
    let private = rng.gen_bool(0.5);
    let a1 = format!("${first}");
    let a2 = format!("${second}");

    let mut v: BTreeMap<&str, String> = BTreeMap::new();
    v.insert("amount", a1.clone());
    v.insert("receiver", from.into());
    b.user(&format!("Please request {a1} from {from}."), vec![(S, state("RequestPayment", &v, &[]), vec![])]);
    b.system(
        &format!("Requesting {a1} from {from}, is that right?"),
        S,
        vec![act("CONFIRM", Some("amount"), &[&a1]), act("CONFIRM", Some("receiver"), &[from])],
    );
    let mut w: BTreeMap<&str, String> = BTreeMap::new();
    w.insert("amount", a2.clone());
    w.insert("receiver", to.into());
    w.insert("payment_method", method.into());
    b.user(
        &format!("Yes. Also send {a2} to {to} using my {method}."),
        vec![(S, state("MakePayment", &w, &[]), vec![act("INFORM_INTENT", None, &["MakePayment"])])],
    );
    b.system("Should the transaction be private?", S, vec![act("REQUEST", Some("private_visibility"), &[])]);
    w.insert("private_visibility", if private { "True" } else { "False" }.into());
    let reply = if private { "Yes, keep it private." } else { "No, it can be public." };
    b.user(reply, vec![(S, state("MakePayment", &w, &[]), vec![])]);
    b.system("The payment has been sent.", S, vec![act("NOTIFY_SUCCESS", None, &[])]);
}

/// `n` dialogues cycling through restaurant, event, payment and a
/// restaurant-then-event dialogue.
pub fn corpus(seed: u64, n: usize) -> Vec<Dialogue> {
    let schema = schema();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut b = Builder::new(&schema);
            let id = format!("synth_{seed}_{i:03}");
            match i % 4 {
                0 => {
                    restaurant_turns(&mut b, &mut rng);
                    b.finish(id, &["Restaurants_1"])
                }
                1 => {
                    event_turns(&mut b, &mut rng, None);
                    b.finish(id, &["Events_1"])
                }
                2 => {
                    payment_turns(&mut b, &mut rng);
                    b.finish(id, &["Payment_1"])
                }
                _ => {
                    restaurant_turns(&mut b, &mut rng);
                    event_turns(&mut b, &mut rng, None);
                    b.finish(id, &["Restaurants_1", "Events_1"])
                }
            }
        })
        .collect()
}

/// Copies of `gold` with user-turn states randomly damaged: slots dropped,
/// misspelled, replaced or invented, intents and requests swapped.
pub fn perturb(gold: &[Dialogue], schema: &Schema, seed: u64) -> Vec<Dialogue> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = gold.to_vec();
    for d in &mut out {
        for turn in &mut d.turns {
            for frame in &mut turn.frames {
                let Some(state) = frame.state.as_mut() else { continue };
                let Some(service) = schema.service(&frame.service) else { continue };
                let names: Vec<String> = state.slot_values.keys().cloned().collect();
                for name in names {
                    match rng.gen_range(0..6) {
                        0 => {
                            state.slot_values.remove(&name);
                        }
                        1 => {
                            let v = state.slot_values.get_mut(&name).unwrap();
                            if let Some(first) = v.first_mut() {
                                let keep = rng.gen_range(0..=first.chars().count());
                                *first = first.chars().take(keep).chain("xy".chars()).collect();
                            }
                        }
                        2 => {
                            state.slot_values.insert(name, vec![DONTCARE.to_string()]);
                        }
                        _ => {}
                    }
                }
                if rng.gen_bool(0.2) {
                    let slot = service.slots.choose(&mut rng).unwrap();
                    let value = slot.possible_values.choose(&mut rng).cloned().unwrap_or_else(|| "somewhere".into());
                    state.slot_values.insert(slot.name.clone(), vec![value]);
                }
                if rng.gen_bool(0.15) {
                    state.active_intent = service.intents.choose(&mut rng).unwrap().name.clone();
                }
                if rng.gen_bool(0.2) {
                    let slot = service.slots.choose(&mut rng).unwrap();
                    state.requested_slots = vec![slot.name.clone()];
                }
            }
        }
    }
    out
}

/// A single payment dialogue whose amount changes with the intent.
pub fn reset_fixture() -> Vec<Dialogue> {
    let schema = schema();
    let mut b = Builder::new(&schema);
    const S: &str = "Payment_1";
    let mut v: BTreeMap<&str, String> = BTreeMap::new();
    v.insert("amount", "$50".into());
    v.insert("receiver", "Amy".into());
    b.user("I need to request $50 from Amy.", vec![(S, state("RequestPayment", &v, &[]), vec![])]);
    b.system(
        "Requesting $50 from Amy, is that right?",
        S,
        vec![act("CONFIRM", Some("amount"), &["$50"]), act("CONFIRM", Some("receiver"), &["Amy"])],
    );
    let mut w: BTreeMap<&str, String> = BTreeMap::new();
    w.insert("amount", "$20".into());
    w.insert("receiver", "Bob".into());
    w.insert("payment_method", "debit card".into());
    b.user("Actually, send $20 to Bob with my debit card instead.", vec![(S, state("MakePayment", &w, &[]), vec![])]);
    b.system("The payment has been sent.", S, vec![act("NOTIFY_SUCCESS", None, &[])]);
    vec![b.finish("reset_payment".into(), &[S])]
}

/// One record of the separable span dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub context: String,
    pub question: String,
    /// Inclusive token span of the answer.
    pub answer: Option<(usize, usize)>,
}

const FILLER: &[&str] = &[
    "the", "table", "city", "near", "please", "find", "show", "time", "book", "place", "good", "with", "tonight",
    "music", "ticket", "venue", "friend", "dinner", "want", "later", "park", "street", "early", "quiet", "open",
];

/// Contexts of filler words; answerable ones contain the marker token once,
/// and the marker is the answer.
pub fn span_dataset(seed: u64, n: usize) -> Vec<SpanRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(6..=20);
            let mut words: Vec<&str> = (0..len).map(|_| pick(&mut rng, FILLER)).collect();
            let answer = if rng.gen_bool(0.8) {
                let pos = rng.gen_range(0..len);
                words[pos] = MRC_MARKER;
                Some((pos, pos))
            } else {
                None
            };
            SpanRecord { context: words.join(" "), question: "which word is marked".into(), answer }
        })
        .collect()
}

/// One service with a single text slot; every user turn names exactly one
/// genre, so the gold candidate is the one mentioned in the utterance.
pub fn wd_separable_schema() -> Schema {
    Schema::new(vec![ServiceDef::new(
        "Music_1",
        "Play songs",
        vec![SlotDef::new("genre", "Genre of the song", &["Rock", "Jazz", "Pop", "Blues", "Country"])],
        vec![IntentDef::new("PlaySong", "Play a song", &[], &["genre"])],
    )])
    .expect("valid")
}

pub fn wd_separable(seed: u64, n: usize) -> Vec<Dialogue> {
    let schema = wd_separable_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let genre = pick(&mut rng, &["Rock", "Jazz", "Pop", "Blues", "Country"]);
            let text = match rng.gen_range(0..3) {
                0 => format!("Play some {} for me.", genre.to_lowercase()),
                1 => format!("I'm in the mood for {genre} tonight."),
                _ => format!("Put on a {} song please.", genre.to_lowercase()),
            };
            let mut v = BTreeMap::new();
            v.insert("genre", genre.to_string());
            let mut b = Builder::new(&schema);
            b.user(&text, vec![("Music_1", state("PlaySong", &v, &[]), vec![])]);
            b.system("Playing now.", "Music_1", vec![]);
            b.finish(format!("wdsep_{i:03}"), &["Music_1"])
        })
        .collect()
}

/// The system confirms a value through its actions while its utterance stays
/// generic, and the user agrees. Only the action history reveals the value.
pub fn ablation_schema() -> Schema {
    Schema::new(vec![ServiceDef::new(
        "Hotels_1",
        "Find places to stay",
        vec![
            SlotDef::new("hotel_type", "Type of lodging", &["Hostel", "Resort", "Motel", "Inn"]),
            SlotDef::new("smoking_allowed", "Whether smoking is allowed", &["True", "False"]),
        ],
        vec![IntentDef::new("SearchHotel", "Search for a place to stay", &[], &["hotel_type", "smoking_allowed"])],
    )])
    .expect("valid")
}

pub fn ablation(seed: u64, n: usize) -> Vec<Dialogue> {
    const S: &str = "Hotels_1";
    let schema = ablation_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let openings = ["I need a place to stay.", "Can you help me find lodging?", "I am looking for somewhere to sleep."];
    let checks = [
        "Let me double check a detail with you.",
        "Before I search, please confirm this detail.",
        "Just to be sure, is this what you want?",
    ];
    let yeses = ["Yes, that is right.", "Yes, correct.", "Sure, that works."];
    (0..n)
        .map(|i| {
            let mut b = Builder::new(&schema);
            let empty = BTreeMap::new();
            b.user(pick(&mut rng, &openings), vec![(S, state("SearchHotel", &empty, &[]), vec![])]);
            let (slot, value) = if rng.gen_bool(0.5) {
                ("hotel_type", pick(&mut rng, &["Hostel", "Resort", "Motel", "Inn"]))
            } else {
                ("smoking_allowed", pick(&mut rng, &["True", "False"]))
            };
            b.system(pick(&mut rng, &checks), S, vec![act("CONFIRM", Some(slot), &[value])]);
            let mut v = BTreeMap::new();
            v.insert(slot, value.to_string());
            b.user(pick(&mut rng, &yeses), vec![(S, state("SearchHotel", &v, &[]), vec![act("AFFIRM", None, &[])])]);
            b.system("Searching now.", S, vec![]);
            b.finish(format!("ablation_{i:03}"), &[S])
        })
        .collect()
}

/// Hand-picked expansions per provider; every other lexicon term is known to
/// the provider with no expansions.
pub fn provider_caches(schema: &Schema) -> Vec<(&'static str, String)> {
    let api: &[(&str, &[&str])] = &[
        ("theater", &["drama", "stage", "playhouse", "performing arts", "show business"]),
        ("music", &["concert", "gig", "live band"]),
        ("sports", &["game", "match", "athletics"]),
        ("italian", &["pasta", "pizza"]),
        ("mexican", &["tacos", "tex-mex"]),
        ("chinese", &["dim sum", "szechuan"]),
        ("indian", &["curry", "tandoori"]),
        ("credit card", &["credit"]),
        ("debit card", &["debit", "bank card"]),
        ("app balance", &["wallet", "balance"]),
        ("city", &["town", "place"]),
        ("restaurant", &["eatery", "diner"]),
        ("music", &["concert", "gig", "live band"]),
        ("free", &["complimentary", "no charge"]),
        ("private", &["hidden", "confidential"]),
        ("tickets", &["passes", "seats"]),
        ("people", &["persons", "guests"]),
    ];
    let backtrans: &[(&str, &[&str])] = &[
        ("theater", &["broadway", "the stage", "acting", "the third acts", "cinema"]),
        ("music", &["musical", "songs"]),
        ("sports", &["sporting", "sport"]),
        ("cuisine", &["kitchen", "food"]),
        ("reservation", &["booking"]),
        ("amount", &["sum", "quantity"]),
        ("contact", &["friend", "person"]),
    ];
    let terms = sgdst_core::augment::lexicon_terms(schema);
    let mut out = Vec::new();
    for (name, source, table) in [("synonym_api", "synonym-api", api), ("backtrans", "back-translation", backtrans)] {
        let mut text = format!("# {source} cache\n");
        for term in &terms {
            let syns: Vec<&str> = table
                .iter()
                .filter(|(t, _)| t == term)
                .flat_map(|(_, s)| s.iter().copied())
                .fold(Vec::new(), |mut acc, s| {
                    if !acc.contains(&s) {
                        acc.push(s);
                    }
                    acc
                });
            if syns.is_empty() {
                text.push_str(&format!("{term}\t\t{name}\t0\n"));
            }
            for (rank, s) in syns.iter().enumerate() {
                let score = 1.0 / (rank as f64 + 1.0);
                text.push_str(&format!("{term}\t{s}\t{name}\t{score}\n"));
            }
        }
        out.push((name, text));
    }
    out
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Every generated file under `data/`, as (relative path, contents).
pub fn fixture_files() -> Vec<(String, String)> {
    let schema = schema();
    let caches = provider_caches(&schema);
    let providers: Vec<CachedProvider> = caches
        .iter()
        .map(|(name, text)| {
            let kind = if *name == "backtrans" { ProviderKind::BackTranslation } else { ProviderKind::SynonymApi };
            CachedProvider::parse(name, kind, text).expect("cache parses")
        })
        .collect();
    let refs: Vec<&dyn ExpansionProvider> = providers.iter().map(|p| p as &dyn ExpansionProvider).collect();
    let lexicon = build_lexicon(&schema, &refs, DEFAULT_K).expect("caches cover the schema");
    let spans: String = span_dataset(MRC_SEED, 200)
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
        .collect();
    let ablation_all = ablation(ABLATION_SEED, 100);
    let mut files = vec![
        ("synthetic/schema.json".to_string(), json(&schema)),
        ("synthetic/oracle/dialogues.json".into(), json(&corpus(ORACLE_SEED, 20))),
        ("synthetic/train/dialogues.json".into(), json(&corpus(TRAIN_SEED, 50))),
        ("synthetic/reset/dialogues.json".into(), json(&reset_fixture())),
        ("synthetic/reset_rules.json".into(), json(&[ResetRule::intent_switch("Payment_1")])),
        ("separable/mrc.jsonl".into(), spans),
        ("separable/wd/schema.json".into(), json(&wd_separable_schema())),
        ("separable/wd/dialogues.json".into(), json(&wd_separable(WD_SEED, 100))),
        ("ablation/schema.json".into(), json(&ablation_schema())),
        ("ablation/train.json".into(), json(&ablation_all[..60])),
        ("ablation/dev.json".into(), json(&ablation_all[60..])),
        ("lexicon/lexicon.tsv".into(), lexicon.to_tsv()),
    ];
    for (name, text) in caches {
        files.push((format!("lexicon/{name}.tsv"), text));
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_validate() {
        let s = schema();
        for d in corpus(ORACLE_SEED, 20).iter().chain(&corpus(TRAIN_SEED, 50)).chain(&reset_fixture()) {
            d.validate(&s).unwrap();
        }
        for d in wd_separable(WD_SEED, 10) {
            d.validate(&wd_separable_schema()).unwrap();
        }
        for d in ablation(ABLATION_SEED, 10) {
            d.validate(&ablation_schema()).unwrap();
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(corpus(3, 8), corpus(3, 8));
        assert_ne!(corpus(3, 8), corpus(4, 8));
        assert_eq!(span_dataset(1, 5), span_dataset(1, 5));
    }
}
