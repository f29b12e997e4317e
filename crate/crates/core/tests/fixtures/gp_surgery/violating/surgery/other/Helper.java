package surgery.other;

public class Helper {
    private static String last;

    public static void print(String text) {
        last = text;
    }

    public static String[] rolesOf(String user) {
        String[] roles = new String[1];
        roles[0] = user;
        return roles;
    }
}
