#include "stackcast/models/container.hpp"

#include <array>
#include <cstring>
#include <stdexcept>

#include "stackcast/common/csv.hpp"

namespace stackcast::models {

namespace {

class Writer {
public:
    template <typename T>
    void pod(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void u64(std::size_t v) { pod(std::uint64_t(v)); }
    void str(std::string_view s) {
        u64(s.size());
        out_.append(s);
    }
    void mat(const Eigen::MatrixXd& m) {
        u64(std::size_t(m.rows()));
        u64(std::size_t(m.cols()));
        if (m.size() > 0) out_.append(reinterpret_cast<const char*>(m.data()), sizeof(double) * std::size_t(m.size()));
    }
    void vec(const Eigen::VectorXd& v) { mat(v); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    template <typename T>
    T pod() {
        T v;
        need(sizeof(T));
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::size_t u64() { return std::size_t(pod<std::uint64_t>()); }
    std::string str() {
        const std::size_t n = u64();
        need(n);
        std::string s(in_.substr(pos_, n));
        pos_ += n;
        return s;
    }
    Eigen::MatrixXd mat() {
        const std::size_t r = u64(), c = u64();
        if (c != 0 && r > (in_.size() / sizeof(double)) / c) throw std::runtime_error("model container: corrupt matrix size");
        Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        need(sizeof(double) * r * c);
        // an empty matrix has a null data pointer, which memcpy may not see
        if (m.size() > 0) std::memcpy(m.data(), in_.data() + pos_, sizeof(double) * r * c);
        pos_ += sizeof(double) * r * c;
        return m;
    }
    Eigen::VectorXd vec() {
        Eigen::MatrixXd m = mat();
        if (m.cols() != 1 && m.size() != 0) throw std::runtime_error("model container: expected a vector");
        if (m.size() == 0) return Eigen::VectorXd();
        return Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
    }
    bool done() const { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw std::runtime_error("model container: truncated");
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

void put_lstm(Writer& w, const LstmNet& net) {
    w.u64(net.layers.size());
    for (const auto& l : net.layers) {
        w.mat(l.Wx);
        w.mat(l.Wh);
        w.vec(l.b);
    }
    w.vec(net.head_w);
    w.pod(net.head_b);
}

LstmNet get_lstm(Reader& r) {
    LstmNet net;
    net.layers.resize(r.u64());
    for (auto& l : net.layers) {
        l.Wx = r.mat();
        l.Wh = r.mat();
        l.b = r.vec();
    }
    net.head_w = r.vec();
    net.head_b = r.pod<double>();
    return net;
}

void put_tree(Writer& w, const RegressionTree& t) {
    w.u64(t.nodes.size());
    for (const auto& n : t.nodes) {
        w.pod(n.feature);
        w.pod(n.threshold);
        w.pod(n.left);
        w.pod(n.right);
        w.pod(n.value);
    }
}

RegressionTree get_tree(Reader& r) {
    RegressionTree t;
    t.nodes.resize(r.u64());
    for (auto& n : t.nodes) {
        n.feature = r.pod<std::int32_t>();
        n.threshold = r.pod<double>();
        n.left = r.pod<std::int32_t>();
        n.right = r.pod<std::int32_t>();
        n.value = r.pod<double>();
    }
    return t;
}

void put_model(Writer& w, const FittedModel& m) {
    w.str(m.model_id);
    w.pod(std::uint8_t(m.family));
    w.u64(m.columns.size());
    for (const auto& c : m.columns) w.str(c);
    w.u64(m.steps);
    w.u64(m.transforms.size());
    for (const auto& t : m.transforms) {
        w.pod(t.lambda);
        w.pod(t.mean);
        w.pod(t.sd);
        w.pod(t.cap);
        w.pod(std::uint8_t(t.constant));
    }
    w.pod(std::uint8_t(m.body.index()));
    switch (m.body.index()) {
        case 0: {
            const auto& a = std::get<ArimaModel>(m.body);
            w.u64(a.p);
            w.u64(a.d);
            w.u64(a.q);
            w.pod(std::uint8_t(a.has_mean));
            w.pod(a.mu);
            w.vec(a.phi);
            w.vec(a.theta);
            w.pod(a.sigma2);
            w.pod(a.aic);
            break;
        }
        case 1: {
            const auto& l = std::get<LinearModel>(m.body);
            w.pod(l.intercept);
            w.vec(l.coef);
            w.u64(l.rank);
            w.pod(std::uint8_t(l.rank_deficient));
            break;
        }
        case 2: {
            const auto& f = std::get<Forest>(m.body);
            w.u64(f.n_features);
            w.u64(f.trees.size());
            for (const auto& t : f.trees) put_tree(w, t);
            break;
        }
        case 3: {
            const auto& f = std::get<Ffnn>(m.body);
            w.mat(f.W1);
            w.vec(f.b1);
            w.vec(f.w2);
            w.pod(f.b2);
            break;
        }
        case 4: put_lstm(w, std::get<LstmNet>(m.body)); break;
        case 5: {
            const auto& f = std::get<FinetunedLstm>(m.body);
            put_lstm(w, f.base);
            w.u64(f.heads.size());
            for (const auto& [k, h] : f.heads) {
                w.str(k);
                w.vec(h.first);
                w.pod(h.second);
            }
            break;
        }
    }
}

FittedModel get_model(Reader& r) {
    FittedModel m;
    m.model_id = r.str();
    const auto fam = r.pod<std::uint8_t>();
    if (fam > std::uint8_t(Family::lstm1_finetune)) throw std::runtime_error("model container: unknown family");
    m.family = Family(fam);
    m.columns.resize(r.u64());
    for (auto& c : m.columns) c = r.str();
    m.steps = r.u64();
    m.transforms.resize(r.u64());
    for (auto& t : m.transforms) {
        t.lambda = r.pod<double>();
        t.mean = r.pod<double>();
        t.sd = r.pod<double>();
        t.cap = r.pod<double>();
        t.constant = r.pod<std::uint8_t>() != 0;
    }
    switch (r.pod<std::uint8_t>()) {
        case 0: {
            ArimaModel a;
            a.p = r.u64();
            a.d = r.u64();
            a.q = r.u64();
            a.has_mean = r.pod<std::uint8_t>() != 0;
            a.mu = r.pod<double>();
            a.phi = r.vec();
            a.theta = r.vec();
            a.sigma2 = r.pod<double>();
            a.aic = r.pod<double>();
            m.body = std::move(a);
            break;
        }
        case 1: {
            LinearModel l;
            l.intercept = r.pod<double>();
            l.coef = r.vec();
            l.rank = r.u64();
            l.rank_deficient = r.pod<std::uint8_t>() != 0;
            m.body = std::move(l);
            break;
        }
        case 2: {
            Forest f;
            f.n_features = r.u64();
            f.trees.resize(r.u64());
            for (auto& t : f.trees) t = get_tree(r);
            m.body = std::move(f);
            break;
        }
        case 3: {
            Ffnn f;
            f.W1 = r.mat();
            f.b1 = r.vec();
            f.w2 = r.vec();
            f.b2 = r.pod<double>();
            m.body = std::move(f);
            break;
        }
        case 4: m.body = get_lstm(r); break;
        case 5: {
            FinetunedLstm f;
            f.base = get_lstm(r);
            const std::size_t k = r.u64();
            for (std::size_t i = 0; i < k; ++i) {
                std::string key = r.str();
                Eigen::VectorXd w = r.vec();
                const double b = r.pod<double>();
                f.heads[key] = {std::move(w), b};
            }
            m.body = std::move(f);
            break;
        }
        default: throw std::runtime_error("model container: unknown model body");
    }
    return m;
}

}  // namespace

std::string encode_models(const std::vector<ModelRecord>& records) {
    Writer w;
    w.pod(std::array<char, 4>{'S', 'C', 'M', 'D'});
    w.pod(kContainerVersion);
    w.u64(records.size());
    for (const auto& rec : records) {
        w.str(rec.manifest_json);
        put_model(w, rec.model);
    }
    return w.take();
}

std::vector<ModelRecord> decode_models(std::string_view bytes) {
    Reader r(bytes);
    const auto magic = r.pod<std::array<char, 4>>();
    if (std::string_view(magic.data(), 4) != "SCMD") throw std::runtime_error("model container: bad magic");
    const auto version = r.pod<std::uint32_t>();
    if (version != kContainerVersion) {
        throw std::runtime_error("model container: unsupported version " + std::to_string(version));
    }
    std::vector<ModelRecord> out(r.u64());
    for (auto& rec : out) {
        rec.manifest_json = r.str();
        rec.model = get_model(r);
    }
    if (!r.done()) throw std::runtime_error("model container: trailing bytes");
    return out;
}

void write_models(const std::filesystem::path& path, const std::vector<ModelRecord>& records) {
    write_text_file(path, encode_models(records));
}

std::vector<ModelRecord> read_models(const std::filesystem::path& path) { return decode_models(read_text_file(path)); }

}  // namespace stackcast::models
