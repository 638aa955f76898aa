// Session tokens live in memory only; a page reload means logging in again.
// Draft query text survives an expiry-triggered redirect so the user does
// not lose what they were typing.

export interface Session {
  token: string;
  userId: string;
  expiresAt: Date;
}

export class SessionStore {
  private session: Session | null = null;
  private drafts = new Map<string, string>();

  setSession(token: string, userId: string, expiresAt: string | Date): void {
    this.session = {
      token,
      userId,
      expiresAt: expiresAt instanceof Date ? expiresAt : new Date(expiresAt),
    };
  }

  getToken(now: Date = new Date()): string | null {
    if (this.session === null) return null;
    if (this.session.expiresAt.getTime() <= now.getTime()) {
      this.session = null;
      return null;
    }
    return this.session.token;
  }

  get userId(): string | null {
    return this.session?.userId ?? null;
  }

  clear(): void {
    this.session = null;
  }

  saveDraft(conversationId: string, text: string): void {
    this.drafts.set(conversationId, text);
  }

  takeDraft(conversationId: string): string {
    const draft = this.drafts.get(conversationId) ?? '';
    this.drafts.delete(conversationId);
    return draft;
  }
}

// Login failures all surface the same message: the gateway intentionally
// does not distinguish a bad user id from a bad secret, and neither do we.
export const GENERIC_LOGIN_FAILURE = 'Login failed. Check your user id and secret.';
