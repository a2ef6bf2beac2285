#include "linmso/engine.hpp"
#include "linmso/errors.hpp"

#include <algorithm>

namespace linmso {

void PosCode::finish(int nset) {
    auto first = w.begin() + static_cast<std::ptrdiff_t>(1 + Layout::obj_words(nobj_) + static_cast<size_t>(nset));
    std::sort(first, w.end());
    w.erase(std::unique(first, w.end()), w.end());
}

bool Shape::has(uint64_t t) const { return std::binary_search(tuples.begin(), tuples.end(), t); }

namespace {

inline uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h *= 0xFF51AFD7ED558CCDULL;
    return h ^ (h >> 31);
}

} // namespace

GameStore::GameStore(Layout layout) : layout_(std::move(layout)) {
    // Ids 0 and 1 are the sentinels; they carry no position.
    nodes_.push_back({0, 0, 0, 0, 0, 0});
    nodes_.push_back({0, 0, 0, 0, 0, 0});
    table_.assign(1024, 0);
}

PosView GameStore::pos(NodeId n) const {
    const Rec& r = nodes_[n];
    const Layout::Node& ln = layout_.node(static_cast<int>(r.phi));
    return {codes_.data() + r.code_off, r.code_len, ln.nobj, ln.nset};
}

uint64_t GameStore::hash_of(int phi, const uint64_t* code, size_t len, const NodeId* kids, size_t nk) {
    uint64_t h = mix(0x12345678ULL, static_cast<uint64_t>(phi));
    for (size_t i = 0; i < len; ++i) h = mix(h, code[i]);
    h = mix(h, 0xABCDEFULL ^ nk);
    for (size_t i = 0; i < nk; ++i) h = mix(h, kids[i]);
    return h;
}

void GameStore::grow() {
    std::vector<uint32_t> t(table_.size() * 2, 0);
    size_t mask = t.size() - 1;
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        size_t i = nodes_[id].hash & mask;
        while (t[i]) i = (i + 1) & mask;
        t[i] = id;
    }
    table_.swap(t);
}

NodeId GameStore::find_or_add(int phi, const uint64_t* code, size_t len, const NodeId* kids, size_t nk,
                              uint64_t h) {
    size_t mask = table_.size() - 1;
    size_t i = h & mask;
    while (uint32_t id = table_[i]) {
        const Rec& r = nodes_[id];
        if (r.hash == h && r.phi == static_cast<uint32_t>(phi) && r.code_len == len && r.kid_len == nk &&
            std::equal(code, code + len, codes_.data() + r.code_off) &&
            std::equal(kids, kids + nk, kids_.data() + r.kid_off))
            return id;
        i = (i + 1) & mask;
    }
    if (nodes_.size() >= UINT32_MAX - 1) throw InvariantError("game store exhausted");
    NodeId id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({static_cast<uint32_t>(phi), static_cast<uint32_t>(len), codes_.size(), kids_.size(),
                      static_cast<uint32_t>(nk), h});
    codes_.insert(codes_.end(), code, code + len);
    kids_.insert(kids_.end(), kids, kids + nk);
    table_[i] = id;
    if (++table_used_ * 2 > table_.size()) grow();
    return id;
}

NodeId GameStore::intern(int phi, const std::vector<uint64_t>& code, std::vector<NodeId>& kids) {
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    uint64_t h = hash_of(phi, code.data(), code.size(), kids.data(), kids.size());
    return find_or_add(phi, code.data(), code.size(), kids.data(), kids.size(), h);
}

uint32_t GameStore::shape_id(const Shape& s) {
    auto key = std::make_pair(s.k, s.tuples);
    auto it = shape_index_.find(key);
    if (it != shape_index_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(shapes_.size());
    shapes_.push_back(s);
    shape_index_.emplace(std::move(key), id);
    return id;
}

uint32_t GameStore::context_id(const std::vector<Object>& X, uint32_t shape) {
    auto key = std::make_pair(X, shape);
    auto it = context_index_.find(key);
    if (it != context_index_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(contexts_.size());
    contexts_.push_back({X, shape});
    context_index_.emplace(std::move(key), id);
    return id;
}

uint32_t GameStore::signature(const std::vector<uint32_t>& s) {
    auto it = sig_index_.find(s);
    if (it != sig_index_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(sig_index_.size());
    sig_index_.emplace(s, id);
    return id;
}

void GameStore::collect(std::vector<NodeId>& roots) {
    std::vector<char> live(nodes_.size(), 0);
    live[kTop] = live[kBottom] = 1;
    std::vector<NodeId> stack;
    auto push = [&](NodeId n) {
        if (!live[n]) {
            live[n] = 1;
            stack.push_back(n);
        }
    };
    for (NodeId r : roots) push(r);
    for (const auto& [_, n] : bag_cache_) push(n);
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (NodeId c : children(n)) push(c);
    }

    // Ids are renumbered monotonically, so sorted child lists stay sorted.
    std::vector<NodeId> remap(nodes_.size(), 0);
    std::vector<Rec> nodes;
    std::vector<uint64_t> codes;
    std::vector<NodeId> kids;
    nodes.push_back(nodes_[kTop]);
    nodes.push_back(nodes_[kBottom]);
    remap[kTop] = kTop;
    remap[kBottom] = kBottom;
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        if (!live[id]) continue;
        Rec r = nodes_[id];
        remap[id] = static_cast<NodeId>(nodes.size());
        uint64_t co = codes.size(), ko = kids.size();
        codes.insert(codes.end(), codes_.begin() + static_cast<std::ptrdiff_t>(r.code_off),
                     codes_.begin() + static_cast<std::ptrdiff_t>(r.code_off + r.code_len));
        for (uint32_t c = 0; c < r.kid_len; ++c) kids.push_back(remap[kids_[r.kid_off + c]]);
        r.code_off = co;
        r.kid_off = ko;
        r.hash = hash_of(static_cast<int>(r.phi), codes.data() + co, r.code_len, kids.data() + ko, r.kid_len);
        nodes.push_back(r);
    }
    nodes_.swap(nodes);
    codes_.swap(codes);
    kids_.swap(kids);
    codes_.shrink_to_fit();
    kids_.shrink_to_fit();
    nodes_.shrink_to_fit();

    size_t cap = 1024;
    while (cap < nodes_.size() * 2 + 2) cap *= 2;
    table_.assign(cap, 0);
    table_used_ = 0;
    size_t mask = cap - 1;
    for (NodeId id = 2; id < nodes_.size(); ++id) {
        size_t i = nodes_[id].hash & mask;
        while (table_[i]) i = (i + 1) & mask;
        table_[i] = id;
        ++table_used_;
    }

    for (NodeId& r : roots) r = remap[r];
    for (auto& [_, n] : bag_cache_) n = remap[n];
    memo_.clear();
    memo_.rehash(0);
}

LocalStructure localize(const Layout& layout, const Structure& a, const ObjectSet& X, int phi) {
    const auto& objs = layout.object_names(phi);
    const auto& sets = layout.set_names(phi);
    Vocabulary expect = layout.vocabulary();
    for (const auto& s : sets) expect.add({s, 1});
    for (size_t j = layout.constants().size(); j < objs.size(); ++j) expect.add({objs[j], 0});
    if (!(a.vocabulary() == expect))
        throw InputError("structure vocabulary does not match the formula at this subformula");
    for (Object x : X)
        if (!a.universe().count(x)) throw InputError("X is not a subset of the universe");
    if (a.size() > 254 || a.size() > static_cast<size_t>(kMaxObjects))
        throw TooLargeError("structure too large for game construction");

    LocalStructure ls;
    for (Object x : X) ls.ids.push_back(x);
    ls.k = static_cast<int>(X.size());
    for (Object o : a.universe())
        if (!X.count(o)) ls.ids.push_back(o);
    std::map<Object, uint8_t> local;
    for (size_t i = 0; i < ls.ids.size(); ++i) local[ls.ids[i]] = static_cast<uint8_t>(i);

    const auto& rels = layout.relations();
    for (size_t r = 0; r < rels.size(); ++r)
        for (const auto& t : a.tuples(rels[r].name)) {
            std::array<uint8_t, kMaxArity> args{};
            for (size_t q = 0; q < t.size(); ++q) args[q] = local.at(t[q]);
            ls.tuples.push_back(pack_tuple(static_cast<int>(r), args.data(), static_cast<int>(t.size())));
        }
    std::sort(ls.tuples.begin(), ls.tuples.end());
    for (const auto& s : sets) {
        uint64_t m = 0;
        for (const auto& t : a.tuples(s)) m |= uint64_t{1} << local.at(t[0]);
        ls.sets.push_back(m);
    }
    for (const auto& o : objs) {
        auto v = a.constant(o);
        ls.objs.push_back(v ? static_cast<uint8_t>(local.at(*v) + 1) : kNil);
    }
    return ls;
}

} // namespace linmso
