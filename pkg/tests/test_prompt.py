import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatepool import (
    ExtractionError,
    ModelProbability,
    PromptTemplate,
    extract_label_probabilities,
    render_prompt,
)

GOLDEN = Path(__file__).parent / "data" / "prompt_golden.txt"


class TestRenderPrompt:
    def test_golden_bytes(self):
        # The golden file is the rendered prompt plus one trailing newline.
        rendered = render_prompt(PromptTemplate(), "You are all wonderful people!")
        assert (rendered + "\n").encode("utf-8") == GOLDEN.read_bytes()

    def test_comment_lands_inside_quotes(self):
        rendered = render_prompt(PromptTemplate(), "abc")
        assert '"abc"' in rendered
        assert "{comment}" not in rendered

    def test_braces_in_comments_pass_through_verbatim(self):
        comment = 'weird {format} stuff {0} {comment!r} {{x}}'
        rendered = render_prompt(PromptTemplate(), comment)
        assert comment in rendered

    def test_empty_comment_rejected(self):
        with pytest.raises(ValueError):
            render_prompt(PromptTemplate(), "")

    def test_template_needs_exactly_one_placeholder(self):
        with pytest.raises(ValueError):
            PromptTemplate(template_text="no placeholder")
        with pytest.raises(ValueError):
            PromptTemplate(template_text="{comment} and {comment}")

    def test_label_tokens_must_differ(self):
        with pytest.raises(ValueError):
            PromptTemplate(hate_token="1", neutral_token="1")
        with pytest.raises(ValueError):
            PromptTemplate(hate_aliases=("x",), neutral_aliases=("x",))

    @given(st.text(min_size=1, max_size=200))
    @settings(max_examples=100, deadline=None)
    def test_only_the_placeholder_changes(self, comment):
        template = PromptTemplate()
        rendered = render_prompt(template, comment)
        prefix, suffix = template.template_text.split("{comment}")
        assert rendered == prefix + comment + suffix


class TestExtractLabelProbabilities:
    def test_renormalizes_two_tokens(self):
        mp = extract_label_probabilities({"1": 0.3, "2": 0.1}, PromptTemplate(), "m")
        assert mp.p_hate == pytest.approx(0.75)
        assert mp.p_neutral == pytest.approx(0.25)
        assert mp.model_id == "m"

    def test_scale_invariance(self):
        template = PromptTemplate()
        a = extract_label_probabilities({"1": 0.3, "2": 0.1}, template)
        b = extract_label_probabilities({"1": 3000.0, "2": 1000.0}, template)
        assert a.p_hate == pytest.approx(b.p_hate, abs=1e-15)

    def test_missing_token_contributes_zero(self):
        mp = extract_label_probabilities({"1": 0.4, "the": 0.6}, PromptTemplate())
        assert mp.p_hate == 1.0

    def test_both_absent_is_extraction_error_naming_text_and_model(self):
        with pytest.raises(ExtractionError) as err:
            extract_label_probabilities(
                {"the": 0.9}, PromptTemplate(), model_id="m1", text_id="t7"
            )
        assert "m1" in str(err.value)
        assert "t7" in str(err.value)

    def test_aliases_pool_into_class_weight(self):
        template = PromptTemplate(hate_aliases=(" 1",), neutral_aliases=(" 2",))
        mp = extract_label_probabilities(
            {"1": 0.2, " 1": 0.2, "2": 0.1, " 2": 0.1}, template
        )
        assert mp.p_hate == pytest.approx(2 / 3)

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            extract_label_probabilities({"1": -0.1, "2": 0.5}, PromptTemplate())

    def test_exp_logprob_weights_behave(self):
        lp_hate, lp_neutral = -0.2, -1.7
        mp = extract_label_probabilities(
            {"1": math.exp(lp_hate), "2": math.exp(lp_neutral)}, PromptTemplate()
        )
        expected = math.exp(lp_hate) / (math.exp(lp_hate) + math.exp(lp_neutral))
        assert mp.p_hate == pytest.approx(expected, abs=1e-15)

    @given(
        st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
        st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
    )
    @settings(max_examples=100, deadline=None)
    def test_probabilities_always_valid(self, w1, w2):
        template = PromptTemplate()
        if w1 + w2 <= 0:
            with pytest.raises(ExtractionError):
                extract_label_probabilities({"1": w1, "2": w2}, template)
            return
        mp = extract_label_probabilities({"1": w1, "2": w2}, template)
        assert 0.0 <= mp.p_hate <= 1.0
        assert abs(mp.p_hate + mp.p_neutral - 1.0) <= 1e-9


class TestModelProbability:
    def test_range_validation(self):
        with pytest.raises(ValueError):
            ModelProbability(model_id="m", p_hate=1.2, p_neutral=-0.2)

    def test_sum_validation(self):
        with pytest.raises(ValueError):
            ModelProbability(model_id="m", p_hate=0.5, p_neutral=0.6)
