"""Registry metadata, README retrieval and fenced code block extraction."""

import json

import pytest

from dtsgen.harvester import (
    CodeExample,
    FetchError,
    FixtureFetcher,
    extract_code_examples,
    fetch_readme,
    resolve_repository,
)


# ---------------------------------------------------------------------------
# extraction


def test_extracts_js_and_javascript_blocks_in_order():
    md = (
        "# pkg\n"
        "```js\n"
        "var a = 1;\n"
        "```\n"
        "prose\n"
        "```javascript\n"
        "var b = 2;\n"
        "```\n"
    )
    examples = extract_code_examples(md)
    assert [e.index for e in examples] == [0, 1]
    assert [e.language for e in examples] == ["js", "javascript"]
    assert examples[0].code == "var a = 1;\n"
    assert examples[1].code == "var b = 2;\n"


def test_ignores_other_languages_and_untagged_blocks():
    md = (
        "```bash\nnpm install x\n```\n"
        "```\nplain\n```\n"
        "```ts\nlet x: number;\n```\n"
    )
    assert extract_code_examples(md) == []


def test_untagged_block_content_is_not_scanned_for_fences():
    # The install block's content must not open or close js regions.
    md = (
        "```\n"
        "npm install pkg\n"
        "```\n"
        "```js\n"
        "use();\n"
        "```\n"
    )
    examples = extract_code_examples(md)
    assert len(examples) == 1
    assert examples[0].code == "use();\n"


def test_language_tag_is_case_insensitive_and_tolerates_attributes():
    md = "```JS\na();\n```\n```js{.line-numbers}\nb();\n```\n"
    examples = extract_code_examples(md)
    assert len(examples) == 2


def test_longer_fences_and_indented_fences():
    md = "````js\ninner();\n````\n   ```js\nindented();\n   ```\n"
    examples = extract_code_examples(md)
    assert [e.code for e in examples] == ["inner();\n", "indented();\n"]


def test_inner_shorter_backtick_runs_do_not_close_fences():
    md = "````js\nconst s = `template`;\n````\n"
    examples = extract_code_examples(md)
    assert len(examples) == 1
    assert "`template`" in examples[0].code


def test_unclosed_fence_runs_to_end_of_document():
    md = "```js\nlast();\n"
    examples = extract_code_examples(md)
    assert examples == [CodeExample(index=0, language="js", code="last();\n")]


def test_crlf_documents_extract_cleanly():
    md = "```js\r\ncall();\r\n```\r\n"
    examples = extract_code_examples(md)
    assert examples[0].code == "call();\n"


def test_empty_document_has_no_examples():
    assert extract_code_examples("") == []


# ---------------------------------------------------------------------------
# fixture fetchers


def test_resolve_repository_from_dict_entry(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    url = resolve_repository("glob-to-regexp", fetcher)
    assert url and "github.com" in url


def test_resolve_repository_accepts_string_entry(tmp_path):
    pkg = tmp_path / "p"
    pkg.mkdir()
    (pkg / "meta.json").write_text(json.dumps({"repository": "github:user/p"}))
    assert resolve_repository("p", FixtureFetcher(tmp_path)) == "github:user/p"


def test_resolve_repository_none_for_missing_package(packages_dir):
    assert resolve_repository("totally-unknown", FixtureFetcher(packages_dir)) is None


def test_resolve_repository_none_without_repository_field(packages_dir):
    assert resolve_repository("pkg-no-repo", FixtureFetcher(packages_dir)) is None


def test_resolve_repository_raises_on_unreadable_metadata(tmp_path):
    pkg = tmp_path / "broken"
    pkg.mkdir()
    (pkg / "meta.json").write_text("{not json")
    with pytest.raises(FetchError):
        resolve_repository("broken", FixtureFetcher(tmp_path))


def test_fetch_readme_finds_conventional_names(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    url = resolve_repository("glob-to-regexp", fetcher)
    text = fetch_readme("glob-to-regexp", url, fetcher)
    assert text and "glob" in text.lower()


def test_fetch_readme_accepts_lowercase_spelling(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    text = fetch_readme("pkg-lowercase-readme", "ignored", fetcher)
    assert text is not None


def test_fetch_readme_none_when_absent(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    assert fetch_readme("pkg-no-readme", "ignored", fetcher) is None


# ---------------------------------------------------------------------------
# fixtures shaped like the documented packages


def test_glob_to_regexp_readme_yields_one_example(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    url = resolve_repository("glob-to-regexp", fetcher)
    examples = extract_code_examples(fetch_readme("glob-to-regexp", url, fetcher))
    assert len(examples) == 1
    assert examples[0].code.count("globToRegExp(") >= 3


def test_package_without_js_blocks(packages_dir):
    fetcher = FixtureFetcher(packages_dir)
    text = fetch_readme("pkg-no-js", "ignored", fetcher)
    assert text is not None
    assert extract_code_examples(text) == []
