#include "qvfuse/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "qvfuse/text.hpp"

namespace qvfuse {

namespace {

const postings_list kEmptyList{};

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) {
        buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) {
        throw data_error("postings file truncated");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    }
    return v;
}

}  // namespace

term_id_t inverted_index::intern_term(const std::string& term) {
    auto it = lexicon_.find(term);
    if (it != lexicon_.end()) {
        return it->second;
    }
    const auto id = static_cast<term_id_t>(terms_.size());
    lexicon_.emplace(term, id);
    terms_.push_back(term);
    lists_.emplace_back();
    return id;
}

void inverted_index::add_document(const std::string& name, const std::vector<std::string>& terms) {
    if (doc_lookup_.count(name)) {
        throw data_error("duplicate docid: " + name);
    }
    const auto id = static_cast<doc_id_t>(doc_table_.size());
    doc_lookup_.emplace(name, id);
    doc_table_.push_back({name, static_cast<std::uint32_t>(terms.size())});

    // Within one document, count frequencies per term.
    std::map<std::string, std::uint32_t> freqs;
    for (const auto& t : terms) {
        ++freqs[t];
    }
    for (const auto& [term, freq] : freqs) {
        lists_[intern_term(term)].postings.push_back({id, freq});
    }
    stats_.total_tokens += terms.size();
}

void inverted_index::finish() {
    stats_.num_docs = doc_table_.size();
}

inverted_index inverted_index::build(const std::vector<corpus_document>& corpus) {
    inverted_index idx;
    for (const auto& doc : corpus) {
        idx.add_document(doc.name, normalize(doc.text));
    }
    idx.finish();
    return idx;
}

inverted_index inverted_index::build_tsv(std::istream& corpus) {
    inverted_index idx;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(corpus, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw data_error("corpus line " + std::to_string(lineno) + ": expected docid<TAB>text");
        }
        idx.add_document(line.substr(0, tab), normalize(std::string_view(line).substr(tab + 1)));
    }
    idx.finish();
    return idx;
}

inverted_index inverted_index::build_from_terms(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
    inverted_index idx;
    for (const auto& [name, terms] : docs) {
        idx.add_document(name, terms);
    }
    idx.finish();
    return idx;
}

std::optional<doc_id_t> inverted_index::doc_by_name(std::string_view name) const {
    auto it = doc_lookup_.find(std::string(name));
    if (it == doc_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

const postings_list& inverted_index::postings(std::string_view term) const {
    auto it = lexicon_.find(std::string(term));
    return it == lexicon_.end() ? kEmptyList : lists_[it->second];
}

std::optional<term_id_t> inverted_index::term_id(std::string_view term) const {
    auto it = lexicon_.find(std::string(term));
    if (it == lexicon_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void inverted_index::compute_upper_bounds(const bm25_params& params) {
    bound_params_ = params;
    for (std::size_t t = 0; t < lists_.size(); ++t) {
        auto& list = lists_[t];
        const term_scorer score(list.postings.size(), stats_, params);
        double bound = 0.0;
        for (const auto& p : list.postings) {
            bound = std::max(bound, score(p.freq, doc_table_[p.doc].length));
        }
        list.upper_bound = bound;
        list.blocks.clear();
    }
    bounds_ready_ = true;
    block_size_ = 0;
}

void inverted_index::compute_block_maxima(std::uint32_t block_size) {
    if (block_size == 0) {
        throw config_error("block size must be at least 1");
    }
    if (!bounds_ready_) {
        throw config_error("compute_upper_bounds must run before compute_block_maxima");
    }
    for (auto& list : lists_) {
        list.blocks.clear();
        const term_scorer score(list.postings.size(), stats_, bound_params_);
        for (std::size_t begin = 0; begin < list.postings.size(); begin += block_size) {
            const std::size_t end = std::min(begin + block_size, list.postings.size());
            double block_max = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto& p = list.postings[i];
                block_max = std::max(block_max, score(p.freq, doc_table_[p.doc].length));
            }
            list.blocks.push_back({list.postings[end - 1].doc, block_max});
        }
    }
    block_size_ = block_size;
}

void inverted_index::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    std::ofstream stats(dir / "stats.txt");
    stats << "qvfuse-index 1\n";
    stats << "num_docs " << stats_.num_docs << "\n";
    stats << "total_tokens " << stats_.total_tokens << "\n";

    std::ofstream doctab(dir / "doctable.tsv");
    for (const auto& d : doc_table_) {
        doctab << d.name << '\t' << d.length << '\n';
    }

    // Lexicon and postings are written in sorted term order so that the
    // serialized form is identical no matter how the index was assembled.
    std::vector<term_id_t> order(terms_.size());
    for (term_id_t i = 0; i < terms_.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](term_id_t a, term_id_t b) { return terms_[a] < terms_[b]; });

    std::ofstream lex(dir / "lexicon.tsv");
    std::ofstream post(dir / "postings.bin", std::ios::binary);
    std::uint64_t offset = 0;
    for (const auto t : order) {
        const auto& list = lists_[t];
        lex << terms_[t] << '\t' << list.postings.size() << '\t' << offset << '\n';
        write_u32(post, static_cast<std::uint32_t>(list.postings.size()));
        for (const auto& p : list.postings) {
            write_u32(post, p.doc);
            write_u32(post, p.freq);
        }
        offset += 4 + 8 * list.postings.size();
    }
}

inverted_index inverted_index::load(const std::filesystem::path& dir) {
    std::ifstream stats_in(dir / "stats.txt");
    if (!stats_in) {
        throw data_error("cannot open index stats: " + (dir / "stats.txt").string());
    }
    std::string magic;
    int version = 0;
    stats_in >> magic >> version;
    if (magic != "qvfuse-index" || version != 1) {
        throw data_error("unrecognized index format in " + dir.string());
    }
    inverted_index idx;
    std::string key;
    std::uint64_t value;
    while (stats_in >> key >> value) {
        if (key == "num_docs") {
            idx.stats_.num_docs = value;
        } else if (key == "total_tokens") {
            idx.stats_.total_tokens = value;
        }
    }

    std::ifstream doctab(dir / "doctable.tsv");
    if (!doctab) {
        throw data_error("cannot open index doc table");
    }
    std::string line;
    while (std::getline(doctab, line)) {
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        doc_entry entry{line.substr(0, tab),
                        static_cast<std::uint32_t>(std::stoul(line.substr(tab + 1)))};
        idx.doc_lookup_.emplace(entry.name, static_cast<doc_id_t>(idx.doc_table_.size()));
        idx.doc_table_.push_back(std::move(entry));
    }
    if (idx.doc_table_.size() != idx.stats_.num_docs) {
        throw data_error("doc table does not match stats");
    }

    std::ifstream lex(dir / "lexicon.tsv");
    std::ifstream post(dir / "postings.bin", std::ios::binary);
    if (!lex || !post) {
        throw data_error("cannot open index lexicon/postings");
    }
    while (std::getline(lex, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string term;
        std::size_t count = 0;
        std::uint64_t offset = 0;
        fields >> term >> count >> offset;
        const auto id = idx.intern_term(term);
        auto& list = idx.lists_[id];
        const auto stored = read_u32(post);
        if (stored != count) {
            throw data_error("postings count mismatch for term: " + term);
        }
        list.postings.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto doc = read_u32(post);
            const auto freq = read_u32(post);
            list.postings.push_back({doc, freq});
        }
    }
    return idx;
}

}  // namespace qvfuse
