import { SessionStore } from './session.js';
import { NdjsonStream, StreamResult, accumulate } from './stream.js';
import {
  Answer,
  Chunk,
  GatewayError,
  answerSchema,
  apiErrorSchema,
  chunkSchema,
} from './types.js';

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly session: SessionStore,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const headers: Record<string, string> = { 'content-type': 'application/json' };
    const token = this.session.getToken();
    if (token !== null) headers['authorization'] = `Bearer ${token}`;
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new GatewayError(apiErrorSchema.parse(await resp.json()));
    }
    return resp;
  }

  async login(userId: string, secret: string): Promise<void> {
    const resp = await this.request('POST', '/v1/auth/login', {
      user_id: userId,
      secret,
    });
    const body = (await resp.json()) as {
      token: string;
      user_id: string;
      expires_at: string;
    };
    this.session.setSession(body.token, body.user_id, body.expires_at);
  }

  async logout(): Promise<void> {
    await this.request('POST', '/v1/auth/logout');
    this.session.clear();
  }

  async query(text: string, conversationId?: string, k?: number): Promise<Answer> {
    const resp = await this.request('POST', '/v1/query', {
      query: text,
      conversation_id: conversationId,
      k,
    });
    return answerSchema.parse(await resp.json());
  }

  async queryStream(
    text: string,
    onText: (partial: string) => void,
    conversationId?: string,
  ): Promise<Answer> {
    const resp = await this.request('POST', '/v1/query/stream', {
      query: text,
      conversation_id: conversationId,
    });
    const parser = new NdjsonStream();
    let result: StreamResult = { text: '', answer: null };
    const reader = resp.body?.getReader();
    if (reader !== undefined) {
      const decoder = new TextDecoder();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        result = accumulate(parser.feed(decoder.decode(value, { stream: true })), result);
        onText(result.text);
      }
    } else {
      result = accumulate(parser.feed(await resp.text()), result);
      onText(result.text);
    }
    if (result.answer === null) {
      throw new Error('stream ended without a final answer frame');
    }
    return result.answer;
  }

  async documentChunks(docId: string): Promise<Chunk[]> {
    const resp = await this.request('GET', `/v1/documents/${docId}/chunks`);
    const body = (await resp.json()) as { chunks: unknown[] };
    return body.chunks.map((c) => chunkSchema.parse(c));
  }
}
