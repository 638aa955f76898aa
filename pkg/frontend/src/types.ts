import { z } from 'zod';

// Mirrors the JSON published under /v1/schema; the UI renders only what the
// API returns, so every inbound body is validated before use.

export const citationSchema = z.object({
  chunk_id: z.string(),
  doc_id: z.string(),
  relevance_score: z.number(),
});

export const verdictSchema = z.object({
  grounded_score: z.number().min(0).max(1),
  unsupported_sentences: z.array(z.number().int()),
  decision: z.enum(['pass', 'flag', 'block']),
  method: z.enum(['lexical', 'llm']),
});

export const answerSchema = z.object({
  text: z.string(),
  citations: z.array(citationSchema),
  verification: verdictSchema.nullable(),
  trace_id: z.string(),
  stage_profile: z.array(z.string()),
  refusal: z.boolean(),
  refusal_reason: z.string().nullable(),
});

export const apiErrorSchema = z.object({
  code: z.string(),
  message: z.string(),
  trace_id: z.string(),
  http_status: z.number().int(),
});

export const chunkSchema = z.object({
  chunk_id: z.string(),
  doc_id: z.string(),
  seq: z.number().int(),
  text: z.string(),
  token_count: z.number().int(),
});

export const streamFrameSchema = z.union([
  z.object({ type: z.literal('text'), text: z.string() }),
  z.object({ type: z.literal('done'), answer: answerSchema }),
]);

export type Citation = z.infer<typeof citationSchema>;
export type Verdict = z.infer<typeof verdictSchema>;
export type Answer = z.infer<typeof answerSchema>;
export type ApiError = z.infer<typeof apiErrorSchema>;
export type Chunk = z.infer<typeof chunkSchema>;
export type StreamFrame = z.infer<typeof streamFrameSchema>;

export class GatewayError extends Error {
  constructor(public readonly detail: ApiError) {
    super(`${detail.code}: ${detail.message}`);
  }
}
