# Filtering a web snapshot down to conversational records.
#
# A record survives when its URL path contains a discussion keyword and
# at least one declared schema.org type is on the conversational
# whitelist. Percent-encoding and letter case are normalized before the
# keyword check.

from hatepool import (
    FilterConfig,
    WebRecord,
    filter_records,
    normalize_url_path,
    subsample_by_language,
)

records = [
    WebRecord("r1", "https://boards.example.com/thread/8841", "eng", ("DiscussionForumPosting",), "long rant"),
    WebRecord("r2", "https://example.de/%46orum/politik", "deu", ("https://schema.org/Comment",), "eine antwort"),
    WebRecord("r3", "https://example.com/status%20update/feed", "eng", ("SocialMediaPosting",), "hot take"),
    WebRecord("r4", "https://example.com/about", "eng", ("Article",), "company boilerplate"),
    WebRecord("r5", "https://shop.example.com/post/123", "eng", ("Product",), "buy now"),
    WebRecord("r6", "not a url at all", "eng", ("Article",), "garbage row"),
    WebRecord("r7", "https://example.es/foro/reply-9", "spa", ("Question",), "una respuesta"),
    WebRecord("r8", "https://example.com/quote/of/the/day", "eng", ("Blog",), "famous words"),
]

print("URL normalization examples:")
for url in ("https://example.de/%46orum/politik", "https://X.com/Status%20Update/1?q=thread"):
    print(f"  {url!r:55} -> {normalize_url_path(url)!r}")

kept_iter, stats = filter_records(records, FilterConfig())
kept = list(kept_iter)

print("\nkept records:")
for record in kept:
    print(f"  {record.id}  {record.lang}  {record.url}")
print("\nfilter counters:")
for key, value in stats.to_dict().items():
    print(f"  {key}: {value}")

# Reservoir subsampling caps one language while passing the rest through.
sampled = subsample_by_language(kept, quotas={"eng": 2}, seed=42)
print("\nafter an eng=2 quota (seed 42):")
for record in sampled:
    print(f"  {record.id}  {record.lang}")
