package surgery.model;

public class AdminModel {
    private Nhspatient nhs = new Nhspatient("Ann");
    private Privatepatient paying = new Privatepatient("Bob");

    public String[] allNames() {
        String[] names = new String[2];
        names[0] = nhs.getFirstName();
        names[1] = paying.getFirstName();
        return names;
    }
}
