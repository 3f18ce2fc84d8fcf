#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hmclf/error.hpp"
#include "hmclf/labels/email_record.hpp"
#include "hmclf/util/random.hpp"

namespace hmclf::pipeline {

/// Probabilities of the four open/delete outcomes for one message class.
struct ActionCoupling {
  double opened_only = 0.0;   ///< opened, not deleted (set A)
  double deleted_only = 0.0;  ///< deleted, not opened (set B)
  double both = 0.0;          ///< opened and deleted

  void validate(const char* what) const {
    for (double p : {opened_only, deleted_only, both}) {
      if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(what) + ": probability outside [0, 1]");
    }
    if (opened_only + deleted_only + both > 1.0 + 1e-12) {
      throw UsageError(std::string(what) + ": action probabilities sum above 1");
    }
  }
};

struct SynthSpec {
  std::size_t n_messages = 20000;
  double human_fraction = 0.05;
  /// Fraction of messages whose subject and body use only class-neutral text.
  double ambiguous_rate = 0.3;
  /// Fraction of gold labels recorded as unknown.
  double unknown_rate = 0.03;
  /// Probability that a message opens with the recipient's name.
  double human_salutation_rate = 0.6;
  double machine_salutation_rate = 0.15;
  ActionCoupling human_actions{0.75, 0.03, 0.10};
  ActionCoupling machine_actions{0.15, 0.45, 0.05};
  std::size_t days = 7;
  std::string start_day = "2024-03-01";
  std::size_t recipients = 200;
  /// Size of the generated pseudo-word pool used as filler text.
  std::size_t filler_words = 4000;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_messages == 0) throw UsageError("n_messages must be positive");
    for (double p : {human_fraction, ambiguous_rate, unknown_rate, human_salutation_rate, machine_salutation_rate}) {
      if (!(p >= 0.0 && p <= 1.0)) throw UsageError("synth spec probability outside [0, 1]");
    }
    human_actions.validate("human_actions");
    machine_actions.validate("machine_actions");
    if (days == 0 || recipients == 0 || filler_words < 10) throw UsageError("synth spec sizes must be positive");
    Day::parse(start_day);
  }
};

namespace synth_detail {

inline const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v = {
      "james", "mary", "john", "patricia", "robert", "jennifer", "michael", "linda", "william", "elizabeth",
      "david", "barbara", "richard", "susan", "joseph", "jessica", "thomas", "sarah", "charles", "karen",
      "christopher", "nancy", "daniel", "lisa", "matthew", "betty", "anthony", "margaret", "mark", "sandra",
      "donald", "ashley", "steven", "kimberly", "paul", "emily", "andrew", "donna", "joshua", "michelle",
      "kenneth", "carol", "kevin", "amanda", "brian", "melissa", "george", "deborah", "timothy", "stephanie",
      "ronald", "rebecca", "edward", "sharon", "jason", "laura", "jeffrey", "cynthia", "ryan", "kathleen",
      "jacob", "amy", "gary", "angela", "nicholas", "shirley", "eric", "anna", "jonathan", "brenda",
      "stephen", "pamela", "larry", "emma", "justin", "nicole", "scott", "helen", "brandon", "samantha",
      "maria", "jose", "wei", "priya", "ahmed", "yuki", "olga", "carlos", "fatima", "liam",
      "sofia", "mateo", "aisha", "chen", "ravi", "ingrid", "kofi", "lucia", "omar", "hana"};
  return v;
}

inline const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v = {
      "smith", "johnson", "williams", "brown", "jones", "garcia", "miller", "davis", "rodriguez", "martinez",
      "hernandez", "lopez", "gonzalez", "wilson", "anderson", "thomas", "taylor", "moore", "jackson", "martin",
      "lee", "perez", "thompson", "white", "harris", "sanchez", "clark", "ramirez", "lewis", "robinson",
      "walker", "young", "allen", "king", "wright", "scott", "torres", "nguyen", "hill", "flores",
      "green", "adams", "nelson", "baker", "hall", "rivera", "campbell", "mitchell", "carter", "roberts",
      "patel", "kim", "singh", "wang", "chen", "kowalski", "muller", "rossi", "dubois", "tanaka",
      "okafor", "silva", "novak", "berg", "murphy", "cohen", "ali", "khan", "ivanova", "larsen"};
  return v;
}

inline const std::vector<std::string>& webmail_domains() {
  static const std::vector<std::string> v = {"gmail.com", "yahoo.com", "outlook.com", "hotmail.com",
                                             "aol.com",   "icloud.com", "proton.me", "mail.com"};
  return v;
}

inline const std::vector<std::string>& machine_prefixes() {
  static const std::vector<std::string> v = {"noreply", "no-reply", "news", "newsletter", "deals", "offers",
                                             "info", "updates", "notifications", "alerts", "support", "billing",
                                             "orders", "mailer", "marketing", "hello", "team", "promo"};
  return v;
}

inline const std::vector<std::string>& machine_name_suffixes() {
  static const std::vector<std::string> v = {"", " Deals", " Team", " News", " Support", " Rewards", " Store",
                                             " Updates", " Alerts", " Club"};
  return v;
}

/// Class-indicative sentence templates; '@' slots take a topic word.
inline const std::vector<std::string>& human_sentences() {
  static const std::vector<std::string> v = {
      "are you free for lunch tomorrow near the @",
      "thanks so much for helping me with the @ yesterday",
      "i just wanted to check how the kids are doing with @",
      "let me know what you think about my @ idea",
      "we should grab dinner this weekend and talk about @",
      "sorry i missed your call, i was stuck at the @",
      "can you send me those photos from the @ trip",
      "mom says hi and wants to know about the @",
      "i found the book you mentioned about @, want to borrow it",
      "happy birthday, hope the @ party goes well",
      "running late, be there in ten minutes with the @",
      "quick question about the @ we talked about",
      "miss you guys, the @ was not the same without you",
      "did you get a chance to look at my @ draft"};
  return v;
}

inline const std::vector<std::string>& machine_sentences() {
  static const std::vector<std::string> v = {
      "save up to 50 percent on @ this week only",
      "your order of @ has shipped and will arrive soon",
      "click here to view this email in your browser",
      "exclusive offer for members, shop the new @ collection",
      "limited time deal on @ ends tonight",
      "your monthly statement for @ is now available",
      "verify your account to keep enjoying @",
      "new arrivals in @ picked just for you",
      "earn double reward points on every @ purchase",
      "your subscription to @ renews automatically",
      "track your package and manage your @ preferences",
      "we have updated our privacy policy for @ customers",
      "free shipping on all @ orders over 25 dollars",
      "rate your recent @ experience and win a gift card"};
  return v;
}

/// Text shared by both classes; messages built only from these are ambiguous.
inline const std::vector<std::string>& neutral_sentences() {
  static const std::vector<std::string> v = {
      "reminder about the @ scheduled for next week",
      "please see the attached document regarding the @",
      "the @ meeting has been moved to thursday",
      "here is the update on the @ you asked about",
      "confirming the details for the @ appointment",
      "the payment for the @ has been received",
      "can you review the @ report before friday",
      "following up on the @ from last month",
      "the @ schedule is attached for your reference",
      "your @ request has been processed"};
  return v;
}

inline const std::vector<std::string>& human_topics() {
  static const std::vector<std::string> v = {"park", "soccer", "garden", "recipe", "concert", "wedding",
                                             "beach", "school", "camping", "puppy", "movie", "hospital",
                                             "piano", "kitchen", "cabin", "bakery", "museum", "reunion"};
  return v;
}

inline const std::vector<std::string>& machine_topics() {
  static const std::vector<std::string> v = {"electronics", "shoes", "streaming", "insurance", "credit",
                                             "furniture", "cosmetics", "travel", "groceries", "fitness",
                                             "software", "fashion", "gaming", "banking", "vitamins", "hotel"};
  return v;
}

inline const std::vector<std::string>& neutral_topics() {
  static const std::vector<std::string> v = {"project", "invoice", "budget", "delivery", "contract", "dentist",
                                             "training", "renovation", "insurance", "quarterly", "team",
                                             "conference", "account", "lease", "tax", "event"};
  return v;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform_index(rng, v.size()))];
}

inline std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

/// Pronounceable pseudo-words from consonant-vowel syllables.
inline std::string pseudo_word(Rng& rng, std::size_t min_syllables, std::size_t max_syllables) {
  static const char* consonants = "bcdfghjklmnprstvwz";
  static const char* vowels = "aeiou";
  const std::size_t n = min_syllables + uniform_index(rng, max_syllables - min_syllables + 1);
  std::string w;
  for (std::size_t i = 0; i < n; ++i) {
    w.push_back(consonants[uniform_index(rng, 18)]);
    w.push_back(vowels[uniform_index(rng, 5)]);
    if (uniform01(rng) < 0.3) w.push_back(consonants[uniform_index(rng, 18)]);
  }
  return w;
}

struct Sender {
  std::string address;
  std::string name;
  bool human = false;
  std::vector<std::string> templates;  // machine senders reuse their own sentences
  std::string topic;
};

/// Index in [0, n) with probability proportional to 1 / (i + 1)^s.
class Zipf {
 public:
  Zipf(std::size_t n, double s) : cdf_(n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1), s);
      cdf_[i] = total;
    }
    for (auto& c : cdf_) c /= total;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng);
    return static_cast<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace synth_detail

/// Seeded synthetic mailbox traffic. Human mail comes from many low-volume
/// personal senders with conversational text; machine mail comes from fewer
/// high-volume brand senders with templated text. A configurable share of
/// both classes uses only neutral text, so content alone cannot separate
/// them and sender, behavior and salutation carry the remaining signal.
inline std::vector<EmailRecord> generate_corpus(const SynthSpec& spec) {
  using namespace synth_detail;
  spec.validate();
  Rng rng(derive_seed(spec.seed, "corpus"));
  Rng text_rng(derive_seed(spec.seed, "filler"));
  std::vector<std::string> filler(spec.filler_words);
  for (auto& w : filler) w = pseudo_word(text_rng, 1, 3);

  auto full_name = [&]() { return std::make_pair(pick(rng, first_names()), pick(rng, last_names())); };

  std::vector<std::string> recipients(spec.recipients);
  for (auto& r : recipients) {
    const auto [f, l] = full_name();
    r = capitalize(f) + " " + capitalize(l);
  }

  const double expected_humans = std::max(1.0, spec.human_fraction * static_cast<double>(spec.n_messages));
  const std::size_t n_human_senders = std::max<std::size_t>(5, static_cast<std::size_t>(expected_humans / 1.6));
  const std::size_t n_machine_senders = std::max<std::size_t>(5, spec.n_messages / 25);

  std::vector<Sender> human_senders(n_human_senders), machine_senders(n_machine_senders);
  for (auto& s : human_senders) {
    const auto [f, l] = full_name();
    s.human = true;
    s.name = capitalize(f) + " " + capitalize(l);
    const double style = uniform01(rng);
    if (style < 0.45) s.address = f + "." + l;
    else if (style < 0.7) s.address = f + l + std::to_string(uniform_index(rng, 100));
    else if (style < 0.9) s.address = f.substr(0, 1) + l;
    else s.address = f + "_" + std::to_string(1950 + uniform_index(rng, 60));
    if (uniform01(rng) < 0.12) {
      s.address += "@" + pseudo_word(rng, 2, 3) + ".org";  // someone writing from work
    } else {
      s.address += "@" + pick(rng, webmail_domains());
    }
    if (uniform01(rng) < 0.1) s.name = capitalize(f);
    s.topic = pick(rng, human_topics());
  }
  for (auto& s : machine_senders) {
    const std::string brand = pseudo_word(rng, 2, 3);
    const double style = uniform01(rng);
    if (style < 0.1) {
      // A brand mailing from a personal-looking mailbox.
      const auto [f, l] = full_name();
      s.address = f + "@" + brand + ".com";
      s.name = capitalize(f) + " at " + capitalize(brand);
    } else {
      static const std::vector<std::string> tlds = {".com", ".net", ".io", ".co", ".shop"};
      s.address = pick(rng, machine_prefixes()) + "@" + (uniform01(rng) < 0.3 ? "mail." : "") + brand + pick(rng, tlds);
      s.name = capitalize(brand) + pick(rng, machine_name_suffixes());
    }
    const std::size_t n_templates = 3 + uniform_index(rng, 3);
    for (std::size_t i = 0; i < n_templates; ++i) s.templates.push_back(pick(rng, machine_sentences()));
    s.topic = pick(rng, machine_topics());
  }
  const Zipf human_zipf(n_human_senders, 0.6);
  const Zipf machine_zipf(n_machine_senders, 0.8);

  auto fill = [&](const std::string& sentence, const std::string& topic) {
    std::string out;
    for (char c : sentence) {
      if (c == '@') out += topic;
      else out.push_back(c);
    }
    return out;
  };
  auto filler_phrase = [&](std::size_t min_words, std::size_t max_words) {
    std::string out;
    const std::size_t n = min_words + uniform_index(rng, max_words - min_words + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!out.empty()) out += ' ';
      out += pick(rng, filler);
    }
    return out;
  };

  const Day start = Day::parse(spec.start_day);
  struct Draft {
    EmailRecord record;
    std::int32_t day;
  };
  std::vector<Draft> drafts;
  drafts.reserve(spec.n_messages);
  for (std::size_t i = 0; i < spec.n_messages; ++i) {
    const bool human = uniform01(rng) < spec.human_fraction;
    const Sender& sender = human ? human_senders[human_zipf(rng)] : machine_senders[machine_zipf(rng)];
    const bool ambiguous = uniform01(rng) < spec.ambiguous_rate;
    EmailRecord r;
    r.sender_address = sender.address;
    r.sender_name = sender.name;
    const std::string recipient = pick(rng, recipients);
    r.recipient_names = {recipient};
    const std::string recipient_first = recipient.substr(0, recipient.find(' '));

    std::vector<std::string> sentences;
    const std::size_t n_sentences = 2 + uniform_index(rng, 4);
    for (std::size_t k = 0; k < n_sentences; ++k) {
      std::string s;
      if (ambiguous) s = fill(pick(rng, neutral_sentences()), pick(rng, neutral_topics()));
      else if (human) s = fill(pick(rng, human_sentences()), uniform01(rng) < 0.5 ? sender.topic : pick(rng, human_topics()));
      else s = fill(pick(rng, sender.templates), uniform01(rng) < 0.6 ? sender.topic : pick(rng, machine_topics()));
      if (uniform01(rng) < 0.7) s += " " + filler_phrase(1, 6);
      sentences.push_back(s);
    }
    if (ambiguous) r.subject = fill(pick(rng, neutral_sentences()), pick(rng, neutral_topics()));
    else if (human) r.subject = pick(rng, std::vector<std::string>{"re: ", "", "fwd: "}) + pick(rng, human_topics()) + " " + filler_phrase(0, 2);
    else r.subject = capitalize(pick(rng, sender.templates).substr(0, 20)) + " " + sender.topic + " " + std::to_string(uniform_index(rng, 1000));
    r.subject = capitalize(r.subject);

    std::string body;
    const double sal_rate = human ? spec.human_salutation_rate : spec.machine_salutation_rate;
    if (uniform01(rng) < sal_rate) {
      static const std::vector<std::string> greet = {"Hi ", "Hey ", "Dear ", "Hello ", ""};
      body = pick(rng, greet) + recipient_first + ", ";
    } else if (uniform01(rng) < 0.5) {
      static const std::vector<std::string> generic = {"Hello, ", "Hi there, ", "Dear customer, ", "Greetings, ",
                                                       "Good morning, ", "Hey all, "};
      body = pick(rng, generic);
    }
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      body += (k == 0 ? capitalize(sentences[k]) : sentences[k]) + ". ";
    }
    if (!ambiguous && !human && uniform01(rng) < 0.7) body += "To unsubscribe from these emails click here. ";
    if (!ambiguous && human && uniform01(rng) < 0.6) {
      body += pick(rng, std::vector<std::string>{"Thanks, ", "Cheers, ", "Love, ", "See you, "}) +
              sender.name.substr(0, sender.name.find(' '));
    }
    r.body = body;

    const ActionCoupling& a = human ? spec.human_actions : spec.machine_actions;
    const double u = uniform01(rng);
    r.opened = u < a.opened_only + a.both;
    r.deleted = (u >= a.opened_only && u < a.opened_only + a.both + a.deleted_only);
    r.gold_label = uniform01(rng) < spec.unknown_rate ? GoldLabel::kUnknown
                                                      : (human ? GoldLabel::kHuman : GoldLabel::kMachine);
    const auto day = start.value + static_cast<std::int32_t>(uniform_index(rng, spec.days));
    drafts.push_back({std::move(r), day});
  }

  // Message ids follow time order so "earliest id" means "earliest message".
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) { return a.day < b.day; });
  std::vector<EmailRecord> out;
  out.reserve(drafts.size());
  const std::size_t width = std::to_string(spec.n_messages).size();
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    EmailRecord r = std::move(drafts[i].record);
    std::string id = std::to_string(i);
    r.message_id = "m" + std::string(width - id.size(), '0') + id;
    r.day = Day{drafts[i].day};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hmclf::pipeline
