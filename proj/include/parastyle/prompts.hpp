#pragma once

// Embedded copies of data/prompts/*.txt (kept identical by the prompt tests).

#include <string_view>

namespace parastyle::prompts {

inline constexpr std::string_view kRecallEvaluation = R"PROMPT(# User Instruction (Ground Truth):
{instruction}

# Model Response:
{response}

# Question:
Please evaluate the Model Response based on the User Instruction. Determine if the model correctly recalled the specific instruction given by the user.

Select one of the following categories:
(A) The response is not answering the Question, is unrelated, meaningless, or avoids the Question.
(B) The response gives an instruction but different from the User Instruction (Ground Truth).
(C) The response answers the question correctly but includes some meaningless sentences that are unrelated to the question.
(D) The response answers and is completely correct regarding the User Instruction.

Return only the single letter of the category (A, B, C, D).
)PROMPT";

inline constexpr std::string_view kCoherenceEvaluation = R"PROMPT(# Task
Your task is to evaluate the quality, coherence, and naturalness of a dialogue. The dialogue provided involves two participants: a "Referee" and a "Participant".

Your job is to assess the **Participant's responses** to the "Referee". You must evaluate the naturalness, coherence, and overall reasonableness of the **Participant's replies only**. Do not score the Referee's sentence.
Focus on whether the Participant's replies are logical, on-topic, and sound natural in the context of the conversation.

# Evaluation Steps
1. ** Analyze the Dialogue Context **
Read the entire dialogue history to understand the conversational flow. Identify the turns belonging to the 'Referee' and the 'Participant'.
2. ** Evaluate Participant's Responses **
Review all responses made by the 'Participant'. Evaluate their overall quality based on the following criteria:
- **Coherence:**
Are the replies logically connected to the Referee's statements? Do they make sense in context, or are they frequently off-topic?
- **Naturalness & Reasonableness:**
Do the replies sound like a real person would say them? Is the content reasonable and appropriate? Do the responses show appropriate depth, or are they overly simplistic/robotic?
3. ** Provide Analysis **
Summarize your findings. Justify your final score by highlighting specific examples of good (coherent, natural) or poor (incoherent, unnatural) responses from the Participant.
4. ** Report the Final Score **
Conclude your evaluation with the following format: Final score: [[score]]. Replace score with an integer in {score_set}. Keep the brackets as shown.

# Scoring Rubric
- 1: **Completely Incoherent**: The Participant's replies are semantically unrelated to the Referee's statements. They are random, nonsensical, or completely off-topic.
- 2: **Mostly Incoherent**: The Participant's replies are only vaguely related (e.g., catching a keyword but missing the point) or frequently introduce irrelevant topics, making the dialogue logically hard to follow.
- 3: **Partially Coherent**: The Participant's replies are generally understandable and respond to the Referee, but contain clear logical leaps, topic drift, or semantic inconsistencies.
- 4: **Mostly Coherent**: The Participant's replies are logical follow-ups and stay on-topic. The dialogue is semantically smooth, with only minor imprecision.
- 5: **Highly Coherent**: The Participant's replies are semantically tightly-coupled to the Referee's statements, logically sound, and accurately advance the conversation, making it very fluent.

# Dialogue
{dialogue}
)PROMPT";

inline constexpr std::string_view kOpenerGeneration = R"PROMPT(# Task
You are given two pieces of information about a conversation:
(1) A short narrative context that describes the social situation.
(2) The original first utterance that started the dialogue.
Rewrite the first utterance into a stronger, more natural opening line that better fits the narrative context.

# Guidelines
- This sentence will be used as the initial input to start a conversation with an AI assistant. If the given conversation is not appropriate for interacting with an AI. For example, if it's clearly directed toward a specific person, then respond only with "no."
- The utterance should be open-ended, encouraging multi-turn, in-depth discussions rather than prompting a single, definitive response.
- Keep the opener suitable for starting a conversation in this situation.
- Preserve the core intent/topic of the original first utterance when appropriate, but improve clarity, grounding, and engagement.
- You may slightly adjust the angle to better align with the narrative, but do NOT invent new facts beyond what the narrative implies.
- Do not mention "narrative" or "dialogue" or that you are rewriting; just produce the line.
- Output ONLY the rewritten opening line (no numbering, quotes, or extra text).

# Narrative:
{narrative}

# Original first utterance:
{first_utterance}
)PROMPT";

inline constexpr std::string_view kSimulatorSystem = R"PROMPT(You are a chatbot. Please start a conversation by opening a new topic. Chat casually and feel free to role-play in different scenarios. If the conversation stalls, you can extend the topic. Keep each response under 20 English words. As this is a spoken dialogue, avoid using words or expressions that cannot be naturally spoken aloud.)PROMPT";

inline constexpr std::string_view kRecallQuery = R"PROMPT(What specific instructions did the user give in the first turn regarding your speaking style for this conversation?)PROMPT";

inline constexpr std::string_view kBaselineVolume = R"PROMPT(You are a text-to-speech model. Please read the given text at a normal volume without adding or omitting anything.)PROMPT";

inline constexpr std::string_view kBaselineSpeed = R"PROMPT(You are a text-to-speech model. Please read the given text at a normal speed without adding or omitting anything.)PROMPT";

}  // namespace parastyle::prompts
